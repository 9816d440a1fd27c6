"""Execution of systems under test.

Two flavors: external executables described by an interface specification
(positional command-line arguments, single numeric token on stdout), and
builtin fixture functions shipped with hand-seeded mutants for desk-scale
mutation analysis. Every fixture mutant applies one small, documented
semantic change (operator replacement, constant perturbation, boundary
shift, or condition negation) and is guaranteed by a self-test to disagree
with the original somewhere in the admissible input space.
"""

from __future__ import annotations

import math
import shlex
import subprocess
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from . import ieee
from .spec_io import (
    InterfaceSpec,
    OutputSpec,
    ParamSpec,
    ValueKind,
    check_input_vector,
    render_value,
)

DEFAULT_TIMEOUT = 5.0


class SutExecutionError(RuntimeError):
    """An execution failed: bad exit status, timeout, unusable output."""


# --- builtin fixtures --------------------------------------------------------
#
# bmi: quotient of weight by squared height (two doubles).

def _bmi(h, w):
    return ieee.divide(w, h * h)


def _bmi_m01(h, w):
    return ieee.divide(w, h)


def _bmi_m02(h, w):
    return ieee.divide(w + 1.0, h * h)


def _bmi_m03(h, w):
    return ieee.divide(w - 1.0, h * h)


def _bmi_m04(h, w):
    return ieee.divide(-w, h * h)


def _bmi_m05(h, w):
    return ieee.divide(w, h + h)


def _bmi_m06(h, w):
    return w * (h * h)


def _bmi_m07(h, w):
    return ieee.divide(h * h, w)


def _bmi_m08(h, w):
    return ieee.divide(w, h * h * h)


def _bmi_m09(h, w):
    return w - h * h


def _bmi_m10(h, w):
    return ieee.divide(w, (h + 1.0) * (h + 1.0))


def _bmi_m11(h, w):
    return ieee.divide(w * w, h * h)


# piecewise: three-branch discontinuous curve over one double.

def _piecewise(x):
    if x < -25.0:
        return 3.0 * x + 40.0
    if x < 30.0:
        return x * x / 10.0 - 2.0
    return 100.0 - x


def _piecewise_m01(x):  # lower boundary shifted
    if x < -20.0:
        return 3.0 * x + 40.0
    if x < 30.0:
        return x * x / 10.0 - 2.0
    return 100.0 - x


def _piecewise_m02(x):  # upper boundary shifted
    if x < -25.0:
        return 3.0 * x + 40.0
    if x < 35.0:
        return x * x / 10.0 - 2.0
    return 100.0 - x


def _piecewise_m03(x):  # first condition negated
    if x >= -25.0:
        return 3.0 * x + 40.0
    if x < 30.0:
        return x * x / 10.0 - 2.0
    return 100.0 - x


def _piecewise_m04(x):  # slope sign flipped
    if x < -25.0:
        return -3.0 * x + 40.0
    if x < 30.0:
        return x * x / 10.0 - 2.0
    return 100.0 - x


def _piecewise_m05(x):  # intercept perturbed
    if x < -25.0:
        return 3.0 * x + 41.0
    if x < 30.0:
        return x * x / 10.0 - 2.0
    return 100.0 - x


def _piecewise_m06(x):  # divisor perturbed
    if x < -25.0:
        return 3.0 * x + 40.0
    if x < 30.0:
        return x * x / 9.0 - 2.0
    return 100.0 - x


def _piecewise_m07(x):  # middle offset sign flipped
    if x < -25.0:
        return 3.0 * x + 40.0
    if x < 30.0:
        return x * x / 10.0 + 2.0
    return 100.0 - x


def _piecewise_m08(x):  # last arm operator replaced
    if x < -25.0:
        return 3.0 * x + 40.0
    if x < 30.0:
        return x * x / 10.0 - 2.0
    return 100.0 + x


def _piecewise_m09(x):  # square dropped
    if x < -25.0:
        return 3.0 * x + 40.0
    if x < 30.0:
        return x / 10.0 - 2.0
    return 100.0 - x


def _piecewise_m10(x):  # intercept operator replaced
    if x < -25.0:
        return 3.0 * x - 40.0
    if x < 30.0:
        return x * x / 10.0 - 2.0
    return 100.0 - x


def _piecewise_m11(x):  # last arm negated
    if x < -25.0:
        return 3.0 * x + 40.0
    if x < 30.0:
        return x * x / 10.0 - 2.0
    return x - 100.0


# poly3: cubic with two local extrema over one double.

def _poly3(x):
    return ((x - 6.0) * x + 4.0) * x + 12.0


def _poly3_m01(x):
    return ((x + 6.0) * x + 4.0) * x + 12.0


def _poly3_m02(x):
    return ((x - 6.0) * x - 4.0) * x + 12.0


def _poly3_m03(x):
    return ((x - 6.0) * x + 4.0) * x - 12.0


def _poly3_m04(x):
    return ((x - 6.0) * x + 4.0) * x + 13.0


def _poly3_m05(x):
    return ((x - 6.0) * x + 5.0) * x + 12.0


def _poly3_m06(x):
    return ((x - 7.0) * x + 4.0) * x + 12.0


def _poly3_m07(x):
    return (x - 6.0) * x + 4.0 * x + 12.0


def _poly3_m08(x):
    return 2.0 * (((x - 6.0) * x + 4.0) * x) + 12.0


def _poly3_m09(x):
    return -(((x - 6.0) * x + 4.0) * x + 12.0)


def _poly3_m10(x):
    return ((x - 6.0) * x + 4.0) * x


def _poly3_m11(x):
    return ((x - 6.0) * x) * x + 12.0


# binom_small: binomial coefficient over two small integers, 0 outside the
# triangle (k > n), as a double.

def _binom(n, k):
    return float(math.comb(n, k))


def _binom_m01(n, k):  # arguments swapped
    return float(math.comb(k, n))


def _binom_m02(n, k):  # selection off by one
    return float(math.comb(n, k + 1))


def _binom_m03(n, k):  # population off by one
    return float(math.comb(n + 1, k))


def _binom_m04(n, k):  # result off by one
    return float(math.comb(n, k)) + 1.0


def _binom_m05(n, k):
    return float(math.comb(n, k)) - 1.0


def _binom_m06(n, k):  # result negated
    return -float(math.comb(n, k))


def _binom_m07(n, k):  # triangle guard negated
    return float(math.comb(n, k)) if k > n else 0.0


def _binom_m08(n, k):  # permutations instead of combinations
    return float(math.perm(n, k))


def _binom_m09(n, k):  # scaled by the selection size
    return float(math.comb(n, k)) * float(k)


def _binom_m10(n, k):  # population shrunk
    return float(math.comb(max(n - 1, 0), k))


def _binom_m11(n, k):  # diagonal excluded
    return float(math.comb(n, k)) if k < n else 0.0


@dataclass(frozen=True)
class Mutant:
    description: str
    fn: Callable


@dataclass(frozen=True)
class Fixture:
    id: str
    description: str
    parameters: tuple[ParamSpec, ...]
    fn: Callable
    mutants: tuple[Mutant, ...]


def _dparam(name: str, lo: float, hi: float) -> ParamSpec:
    return ParamSpec(name=name, kind=ValueKind.DOUBLE, min=lo, max=hi)


def _iparam(name: str, lo: int, hi: int) -> ParamSpec:
    return ParamSpec(name=name, kind=ValueKind.INTEGER, min=lo, max=hi)


_FIXTURES: dict[str, Fixture] = {}


def _register(fixture: Fixture):
    _FIXTURES[fixture.id] = fixture


_register(Fixture(
    id="bmi",
    description="weight divided by squared height",
    parameters=(_dparam("height", -100.0, 100.0), _dparam("weight", -100.0, 100.0)),
    fn=_bmi,
    mutants=(
        Mutant("weight/height (square dropped)", _bmi_m01),
        Mutant("numerator +1", _bmi_m02),
        Mutant("numerator -1", _bmi_m03),
        Mutant("numerator negated", _bmi_m04),
        Mutant("height*height -> height+height", _bmi_m05),
        Mutant("division -> multiplication", _bmi_m06),
        Mutant("operands swapped", _bmi_m07),
        Mutant("height cubed", _bmi_m08),
        Mutant("division -> subtraction", _bmi_m09),
        Mutant("height shifted by +1", _bmi_m10),
        Mutant("numerator squared", _bmi_m11),
    ),
))

_register(Fixture(
    id="piecewise",
    description="three-branch discontinuous curve (linear, quadratic, linear)",
    parameters=(_dparam("x", -100.0, 100.0),),
    fn=_piecewise,
    mutants=(
        Mutant("lower boundary -25 -> -20", _piecewise_m01),
        Mutant("upper boundary 30 -> 35", _piecewise_m02),
        Mutant("first condition negated", _piecewise_m03),
        Mutant("first-arm slope 3 -> -3", _piecewise_m04),
        Mutant("first-arm intercept 40 -> 41", _piecewise_m05),
        Mutant("middle divisor 10 -> 9", _piecewise_m06),
        Mutant("middle offset -2 -> +2", _piecewise_m07),
        Mutant("last arm 100-x -> 100+x", _piecewise_m08),
        Mutant("middle square dropped", _piecewise_m09),
        Mutant("first-arm +40 -> -40", _piecewise_m10),
        Mutant("last arm negated", _piecewise_m11),
    ),
))

_register(Fixture(
    id="poly3",
    description="cubic x^3 - 6x^2 + 4x + 12 with two local extrema",
    parameters=(_dparam("x", -10.0, 10.0),),
    fn=_poly3,
    mutants=(
        Mutant("quadratic coefficient sign flipped", _poly3_m01),
        Mutant("linear coefficient sign flipped", _poly3_m02),
        Mutant("constant sign flipped", _poly3_m03),
        Mutant("constant 12 -> 13", _poly3_m04),
        Mutant("linear coefficient 4 -> 5", _poly3_m05),
        Mutant("quadratic coefficient 6 -> 7", _poly3_m06),
        Mutant("cubic term dropped to quadratic", _poly3_m07),
        Mutant("polynomial part doubled", _poly3_m08),
        Mutant("whole result negated", _poly3_m09),
        Mutant("constant term dropped", _poly3_m10),
        Mutant("linear term dropped", _poly3_m11),
    ),
))

_register(Fixture(
    id="binom_small",
    description="binomial coefficient C(n, k) as a double (0 when k > n)",
    parameters=(_iparam("n", 0, 12), _iparam("k", 0, 12)),
    fn=_binom,
    mutants=(
        Mutant("arguments swapped", _binom_m01),
        Mutant("selection k -> k+1", _binom_m02),
        Mutant("population n -> n+1", _binom_m03),
        Mutant("result +1", _binom_m04),
        Mutant("result -1", _binom_m05),
        Mutant("result negated", _binom_m06),
        Mutant("triangle guard negated", _binom_m07),
        Mutant("combinations -> permutations", _binom_m08),
        Mutant("result scaled by k", _binom_m09),
        Mutant("population n -> n-1", _binom_m10),
        Mutant("diagonal k == n excluded", _binom_m11),
    ),
))


@dataclass(frozen=True)
class FixtureCatalogEntry:
    """Public catalog row: identity, interface, and mutant descriptions."""

    id: str
    description: str
    parameters: tuple[ParamSpec, ...]
    mutants: tuple[str, ...]


def catalog() -> list[FixtureCatalogEntry]:
    """All builtin fixtures, in registration order."""
    return [
        FixtureCatalogEntry(
            id=f.id,
            description=f.description,
            parameters=f.parameters,
            mutants=tuple(m.description for m in f.mutants),
        )
        for f in _FIXTURES.values()
    ]


def fixture(fixture_id: str) -> Fixture:
    try:
        return _FIXTURES[fixture_id]
    except KeyError:
        known = ", ".join(_FIXTURES)
        raise ValueError(f"unknown fixture {fixture_id!r} (known: {known})") from None


def interface_spec(fixture_id: str) -> InterfaceSpec:
    """An InterfaceSpec describing a builtin fixture."""
    f = fixture(fixture_id)
    return InterfaceSpec(
        command=f"builtin:{f.id}",
        parameters=f.parameters,
        output=OutputSpec(name="output", kind=ValueKind.DOUBLE),
    )


# --- handles -----------------------------------------------------------------

@dataclass(frozen=True)
class BuiltinSut:
    """Handle on a builtin fixture; ``variant`` selects a mutant by index."""

    fixture_id: str
    variant: int | None = None

    def __post_init__(self):
        f = fixture(self.fixture_id)
        if self.variant is not None and not (0 <= self.variant < len(f.mutants)):
            raise ValueError(
                f"{self.fixture_id}: mutant index {self.variant} out of range "
                f"(fixture has {len(f.mutants)} mutants)"
            )

    @property
    def spec(self) -> InterfaceSpec:
        return interface_spec(self.fixture_id)

    def __call__(self, input_vector) -> float:
        return execute(self, input_vector)


@dataclass(frozen=True)
class ExternalSut:
    """Handle on an external executable described by an interface spec.

    A relative command resolves against ``base_dir`` (normally the directory
    containing the specification file).
    """

    spec: InterfaceSpec
    timeout: float = DEFAULT_TIMEOUT
    base_dir: str | None = None

    def __call__(self, input_vector) -> float:
        return execute(self, input_vector)


SutHandle = BuiltinSut | ExternalSut


def _resolve_argv(handle: ExternalSut, input_vector) -> list[str]:
    argv = shlex.split(handle.spec.command)
    if not argv:
        raise SutExecutionError("interface spec has an empty command")
    if handle.base_dir is not None and not Path(argv[0]).is_absolute():
        argv[0] = str(Path(handle.base_dir) / argv[0])
    argv.extend(render_value(v) for v in input_vector)
    return argv


def _parse_output(stdout: str, cmdline: str) -> float:
    tokens = stdout.split()
    if len(tokens) != 1:
        raise SutExecutionError(
            f"{cmdline}: expected a single numeric token on stdout, "
            f"got {stdout!r}"
        )
    try:
        return float(tokens[0])
    except ValueError:
        raise SutExecutionError(
            f"{cmdline}: cannot parse output token {tokens[0]!r} as a number"
        ) from None


def execute(handle: SutHandle, input_vector) -> float:
    """Run the SUT on one input vector and return its numeric output.

    Builtin fixtures are computed in-process. External commands get one
    positional argument per parameter (test-file token encoding) and must
    print a single numeric token (``inf``/``-inf``/``nan`` accepted) and
    exit 0.
    """
    if isinstance(handle, BuiltinSut):
        f = fixture(handle.fixture_id)
        values = check_input_vector(input_vector, interface_spec(handle.fixture_id))
        fn = f.fn if handle.variant is None else f.mutants[handle.variant].fn
        try:
            return float(fn(*values))
        except Exception as exc:  # a crashing fixture is a SUT failure
            raise SutExecutionError(
                f"builtin {handle.fixture_id!r} on {values!r}: {exc}"
            ) from exc

    values = check_input_vector(input_vector, handle.spec)
    argv = _resolve_argv(handle, values)
    cmdline = shlex.join(argv)
    try:
        proc = subprocess.run(
            argv,
            capture_output=True,
            text=True,
            timeout=handle.timeout,
        )
    except subprocess.TimeoutExpired:
        raise SutExecutionError(
            f"{cmdline}: timed out after {handle.timeout}s"
        ) from None
    except OSError as exc:
        raise SutExecutionError(f"{cmdline}: {exc}") from exc
    if proc.returncode != 0:
        raise SutExecutionError(
            f"{cmdline}: exit status {proc.returncode}; "
            f"stdout={proc.stdout!r} stderr={proc.stderr!r}"
        )
    return _parse_output(proc.stdout, cmdline)


def verify_deterministic(handle: SutHandle, sample_inputs) -> None:
    """Double-run a sample of inputs; a mismatch means the SUT is not
    deterministic and the campaign must not proceed."""
    for u in sample_inputs:
        first = execute(handle, u)
        second = execute(handle, u)
        same = (first == second) or (math.isnan(first) and math.isnan(second))
        if not same:
            raise SutExecutionError(
                f"SUT is not deterministic on input {tuple(u)!r}: "
                f"{first!r} then {second!r}"
            )
