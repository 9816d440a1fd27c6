"""Interface-specification and test-file formats.

Two external formats are handled here:

* the JSON interface specification describing the program under test
  (its command, its typed and bounded parameters, and its numeric output);
* the plain-text test-input file, one test per line, values separated by
  spaces and bound to parameters positionally.

Both parsers reject malformed input with a diagnostic naming the offending
field or line; nothing is silently defaulted.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence


class SpecError(ValueError):
    """Base class for specification and test-file problems."""


class SpecFormatError(SpecError):
    """The document is not syntactically valid (bad JSON, etc.)."""


class SpecValidationError(SpecError):
    """The document parses but violates a declared constraint."""


class TestInputError(SpecError):
    """A test-input line cannot be bound to the interface specification."""


class ValueKind(Enum):
    """The four primitive value kinds a parameter or expression may carry."""

    DOUBLE = "double"
    INTEGER = "integer"
    BOOLEAN = "boolean"
    STRING = "string"

    @classmethod
    def from_name(cls, name: str) -> "ValueKind":
        try:
            return cls(name)
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise SpecValidationError(
                f"unknown kind {name!r} (expected one of: {valid})"
            ) from None


NUMERIC_KINDS = (ValueKind.DOUBLE, ValueKind.INTEGER)


@dataclass(frozen=True)
class ParamSpec:
    """One declared input parameter.

    Numeric parameters carry inclusive ``min``/``max`` bounds; string
    parameters carry an explicit enumeration of admissible values. Integer
    bounds supplied as fractional numbers are truncated toward zero.
    """

    name: str
    kind: ValueKind
    min: float | int | None = None
    max: float | int | None = None
    values: tuple[str, ...] | None = None

    def __post_init__(self):
        if not self.name or any(c.isspace() for c in self.name):
            raise SpecValidationError(f"invalid parameter name {self.name!r}")
        if self.kind in NUMERIC_KINDS:
            if self.min is None or self.max is None:
                raise SpecValidationError(
                    f"parameter {self.name!r}: numeric kinds require min and max"
                )
            if self.values is not None:
                raise SpecValidationError(
                    f"parameter {self.name!r}: 'values' is only valid for strings"
                )
            lo, hi = float(self.min), float(self.max)
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise SpecValidationError(
                    f"parameter {self.name!r}: bounds must be finite"
                )
            if self.kind is ValueKind.INTEGER:
                lo, hi = float(math.trunc(lo)), float(math.trunc(hi))
                object.__setattr__(self, "min", int(lo))
                object.__setattr__(self, "max", int(hi))
            else:
                object.__setattr__(self, "min", lo)
                object.__setattr__(self, "max", hi)
            if lo > hi:
                raise SpecValidationError(
                    f"parameter {self.name!r}: min {self.min} exceeds max {self.max}"
                )
        elif self.kind is ValueKind.STRING:
            if self.min is not None or self.max is not None:
                raise SpecValidationError(
                    f"parameter {self.name!r}: string parameters take no bounds"
                )
            if not self.values:
                raise SpecValidationError(
                    f"parameter {self.name!r}: string kind requires a non-empty "
                    "'values' enumeration"
                )
            vals = tuple(self.values)
            for v in vals:
                if not isinstance(v, str) or not v or any(c.isspace() for c in v):
                    raise SpecValidationError(
                        f"parameter {self.name!r}: enumerated value {v!r} must be "
                        "a non-empty token without whitespace"
                    )
            object.__setattr__(self, "values", vals)
        else:  # boolean
            if self.min is not None or self.max is not None or self.values:
                raise SpecValidationError(
                    f"parameter {self.name!r}: boolean parameters take no "
                    "bounds or values"
                )


@dataclass(frozen=True)
class OutputSpec:
    """The declared output: a named value restricted to double or integer."""

    name: str
    kind: ValueKind

    def __post_init__(self):
        if self.kind not in NUMERIC_KINDS:
            raise SpecValidationError(
                f"output {self.name!r}: kind must be double or integer, "
                f"not {self.kind.value}"
            )


@dataclass(frozen=True)
class InterfaceSpec:
    """Everything the tool knows about the program under test."""

    command: str
    parameters: tuple[ParamSpec, ...]
    output: OutputSpec

    def __post_init__(self):
        object.__setattr__(self, "parameters", tuple(self.parameters))
        if not self.parameters:
            raise SpecValidationError("parameters: at least one parameter required")
        seen: set[str] = set()
        for p in self.parameters:
            if p.name in seen:
                raise SpecValidationError(f"duplicate parameter name {p.name!r}")
            seen.add(p.name)

    @property
    def arity(self) -> int:
        return len(self.parameters)

    def parameter(self, name: str) -> ParamSpec:
        for p in self.parameters:
            if p.name == name:
                return p
        raise KeyError(name)


# An InputVector is a plain tuple of Python values (float/int/bool/str),
# position-aligned with InterfaceSpec.parameters.
InputVector = tuple


def _coerce_number(raw, field: str) -> float:
    """Accept JSON numbers or numeric strings (the reference listing quotes
    its bounds)."""
    if isinstance(raw, bool):
        raise SpecValidationError(f"{field}: expected a number, got a boolean")
    if isinstance(raw, (int, float)):
        return float(raw)
    if isinstance(raw, str):
        try:
            return float(raw)
        except ValueError:
            raise SpecValidationError(f"{field}: {raw!r} is not a number") from None
    raise SpecValidationError(f"{field}: expected a number, got {type(raw).__name__}")


def _parse_param(obj, index: int) -> ParamSpec:
    field = f"parameters[{index}]"
    if not isinstance(obj, dict):
        raise SpecValidationError(f"{field}: expected an object")
    name = obj.get("name")
    if not isinstance(name, str) or not name:
        raise SpecValidationError(f"{field}.name: missing or not a string")
    kind = ValueKind.from_name(_require_str(obj, "type", field))
    mn = obj.get("min")
    mx = obj.get("max")
    values = obj.get("values")
    if kind in NUMERIC_KINDS:
        if mn is None or mx is None:
            raise SpecValidationError(
                f"{field} ({name!r}): numeric parameters require 'min' and 'max'"
            )
        mn = _coerce_number(mn, f"{field}.min")
        mx = _coerce_number(mx, f"{field}.max")
    if values is not None:
        if not isinstance(values, list) or not all(isinstance(v, str) for v in values):
            raise SpecValidationError(
                f"{field}.values: expected a list of strings"
            )
        values = tuple(values)
    return ParamSpec(name=name, kind=kind, min=mn, max=mx, values=values)


def _require_str(obj: dict, key: str, field: str) -> str:
    raw = obj.get(key)
    if not isinstance(raw, str) or not raw:
        raise SpecValidationError(f"{field}.{key}: missing or not a string")
    return raw


def parse_interface_spec(text: str) -> InterfaceSpec:
    """Parse the JSON interface specification.

    Raises SpecFormatError (with line/column) for malformed JSON and
    SpecValidationError naming the offending field for semantic problems.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFormatError(
            f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise SpecValidationError("top level: expected a JSON object")
    command = _require_str(doc, "command", "spec")
    raw_params = doc.get("parameters")
    if not isinstance(raw_params, list):
        raise SpecValidationError("parameters: missing or not a list")
    params = tuple(_parse_param(p, i) for i, p in enumerate(raw_params))

    raw_out = doc.get("output")
    if isinstance(raw_out, list):
        if len(raw_out) != 1:
            raise SpecValidationError("output: expected exactly one declaration")
        raw_out = raw_out[0]
    if not isinstance(raw_out, dict):
        raise SpecValidationError("output: missing or not an object")
    output = OutputSpec(
        name=_require_str(raw_out, "name", "output"),
        kind=ValueKind.from_name(_require_str(raw_out, "type", "output")),
    )
    return InterfaceSpec(command=command, parameters=params, output=output)


def write_interface_spec(spec: InterfaceSpec) -> str:
    """Render a specification back to its JSON form."""
    params = []
    for p in spec.parameters:
        obj: dict = {"name": p.name, "type": p.kind.value}
        if p.kind in NUMERIC_KINDS:
            obj["max"] = p.max
            obj["min"] = p.min
        if p.values is not None:
            obj["values"] = list(p.values)
        params.append(obj)
    doc = {
        "command": spec.command,
        "parameters": params,
        "output": [{"name": spec.output.name, "type": spec.output.kind.value}],
    }
    return json.dumps(doc, indent=4) + "\n"


def check_input_vector(
    values: Sequence, spec: InterfaceSpec, enforce_bounds: bool = False
) -> tuple:
    """Validate one input vector against the spec; returns it as a tuple.

    Kind and arity are always checked. Bounds and string enumerations are
    sampling ranges (user-supplied seed tests may legitimately lie outside
    them), so they are only enforced on request — the generators promise
    them for every vector they produce.
    """
    if len(values) != spec.arity:
        raise SpecValidationError(
            f"expected {spec.arity} values, got {len(values)}"
        )
    out = []
    for v, p in zip(values, spec.parameters):
        if p.kind is ValueKind.DOUBLE:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise SpecValidationError(f"{p.name}: expected a double, got {v!r}")
            v = float(v)
            if enforce_bounds and not (p.min <= v <= p.max):
                raise SpecValidationError(
                    f"{p.name}: {v!r} outside [{p.min}, {p.max}]"
                )
        elif p.kind is ValueKind.INTEGER:
            if isinstance(v, bool) or not isinstance(v, int):
                raise SpecValidationError(f"{p.name}: expected an integer, got {v!r}")
            if enforce_bounds and not (p.min <= v <= p.max):
                raise SpecValidationError(
                    f"{p.name}: {v!r} outside [{p.min}, {p.max}]"
                )
        elif p.kind is ValueKind.BOOLEAN:
            if not isinstance(v, bool):
                raise SpecValidationError(f"{p.name}: expected a boolean, got {v!r}")
        else:  # string
            if not isinstance(v, str):
                raise SpecValidationError(f"{p.name}: expected a string, got {v!r}")
            if enforce_bounds and v not in p.values:
                raise SpecValidationError(
                    f"{p.name}: {v!r} not among the enumerated values"
                )
        out.append(v)
    return tuple(out)


def _parse_token(token: str, p: ParamSpec, lineno: int):
    # Bounds are sampling ranges, not parse-time constraints: established
    # seed suites may exceed them.
    where = f"line {lineno}, parameter {p.name!r}"
    if p.kind is ValueKind.DOUBLE:
        try:
            return float(token)
        except ValueError:
            raise TestInputError(f"{where}: {token!r} is not a double") from None
    if p.kind is ValueKind.INTEGER:
        try:
            return int(token, 10)
        except ValueError:
            raise TestInputError(f"{where}: {token!r} is not an integer") from None
    if p.kind is ValueKind.BOOLEAN:
        low = token.lower()
        if low == "true":
            return True
        if low == "false":
            return False
        raise TestInputError(f"{where}: {token!r} is not true/false")
    return token


def parse_test_inputs(text: str, spec: InterfaceSpec) -> list[tuple]:
    """Parse a space-separated test file into input vectors.

    Columns bind to parameters positionally. Blank lines and lines starting
    with ``#`` are ignored. Errors carry the 1-based line number.
    """
    vectors: list[tuple] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != spec.arity:
            raise TestInputError(
                f"line {lineno}: expected {spec.arity} values, got {len(tokens)}"
            )
        vectors.append(
            tuple(_parse_token(t, p, lineno) for t, p in zip(tokens, spec.parameters))
        )
    return vectors


def render_value(v) -> str:
    """Render one value as a test-file token (also the child-process
    argument encoding)."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        if not v or any(c.isspace() for c in v):
            raise ValueError(f"string value {v!r} cannot be a test-file token")
        return v
    raise TypeError(f"cannot render {type(v).__name__} value {v!r}")


def write_test_inputs(inputs: Iterable[Sequence]) -> str:
    """Render input vectors in the test-file format.

    Doubles are written at full round-trip precision, so
    ``parse_test_inputs(write_test_inputs(x), spec) == x`` value-wise.
    """
    rows = [tuple(v) for v in inputs]
    if not rows:
        return ""
    arity = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != arity:
            raise ValueError(
                f"mixed arities: row 0 has {arity} values, row {i} has {len(row)}"
            )
    return "".join(" ".join(render_value(v) for v in row) + "\n" for row in rows)
