"""Strongly-typed expression trees: the model representation.

Trees are built from a fixed operator table (arithmetic, comparisons,
logic, casts, and a polymorphic if-then-else) plus terminals: parameter
references, fixed constants, and "ephemeral" free constants whose value is
sampled at creation time. Every node carries a declared value kind, and all
construction paths (random generation, crossover, mutation) preserve
well-typedness by construction.

Numeric evaluation follows IEEE double semantics: division by zero, logs of
non-positive values and the like produce infinities or NaN rather than
exceptions. Masking of non-finite values happens downstream, not here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

from .spec_io import InterfaceSpec, ValueKind

D = ValueKind.DOUBLE
I = ValueKind.INTEGER
B = ValueKind.BOOLEAN
S = ValueKind.STRING

KIND_ORDER = (D, I, B, S)

DEFAULT_MAX_DEPTH = 10

# |x - y| <= tol * max(1, |x|, |y|): exact double equality is almost never
# satisfiable by an evolved expression.
DEFAULT_EQ_TOLERANCE = 1e-9

EPHEMERAL_RANGE = (-2.0, 2.0)
EPHEMERAL_INTEGERS = (-2, -1, 0, 1, 2)


class ExprError(ValueError):
    """Base class for malformed-tree problems."""


class ExprTypeError(ExprError):
    """A tree violates the typing rules (arity, child kind, constant kind)."""


class UnboundVariableError(ExprTypeError):
    """A variable node names no parameter of the active interface spec."""


@dataclass(frozen=True)
class OperatorSignature:
    name: str
    arg_kinds: tuple[ValueKind, ...]
    result_kind: ValueKind
    label: str  # rendering name, e.g. "Mult"

    @property
    def arity(self) -> int:
        return len(self.arg_kinds)


def _sig(name, args, result, label):
    return OperatorSignature(name, tuple(args), result, label)


OPERATORS: tuple[OperatorSignature, ...] = (
    _sig("add", (D, D), D, "Add"),
    _sig("subtract", (D, D), D, "Sub"),
    _sig("multiply", (D, D), D, "Mult"),
    _sig("divide", (D, D), D, "Div"),
    _sig("power", (D, D), D, "Pow"),
    _sig("root", (D, D), D, "Root"),
    _sig("cast_to_double", (I,), D, "CastD"),
    _sig("cos", (D,), D, "Cos"),
    _sig("exp", (D,), D, "Exp"),
    _sig("log", (D,), D, "Log"),
    _sig("cast_to_int", (D,), I, "CastI"),
    _sig("and", (B, B), B, "And"),
    _sig("or", (B, B), B, "Or"),
    _sig("lt", (D, D), B, "LT"),
    _sig("gt", (D, D), B, "GT"),
    _sig("eq_bool", (B, B), B, "EQ"),
    _sig("eq_arith", (D, D), B, "EQArith"),
    _sig("eq_string", (S, S), B, "EQString"),
    # one polymorphic if-then-else family, instantiated per result kind
    _sig("if_double", (B, D, D), D, "If"),
    _sig("if_int", (B, I, I), I, "If"),
    _sig("if_bool", (B, B, B), B, "If"),
    _sig("if_string", (B, S, S), S, "If"),
)

OPERATOR_BY_NAME = {op.name: op for op in OPERATORS}


@dataclass(frozen=True)
class Var:
    """Reference to a declared parameter."""

    name: str
    kind: ValueKind


@dataclass(frozen=True)
class Const:
    """A literal terminal; ephemeral constants are resampled on mutation."""

    value: object
    kind: ValueKind
    ephemeral: bool = False


@dataclass(frozen=True)
class Call:
    op: OperatorSignature
    args: tuple["ExprTree", ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


ExprTree = Union[Var, Const, Call]


@dataclass(frozen=True)
class EvalResult:
    """One evaluation outcome; ``finite`` is False exactly when a numeric
    result is an IEEE infinity or NaN."""

    value: object
    finite: bool = True


def result_kind(tree: ExprTree) -> ValueKind:
    return tree.op.result_kind if isinstance(tree, Call) else tree.kind


def depth(tree: ExprTree) -> int:
    """1 for a terminal, 1 + deepest child otherwise."""
    if isinstance(tree, Call):
        return 1 + max(depth(a) for a in tree.args)
    return 1


def size(tree: ExprTree) -> int:
    """Total node count."""
    if isinstance(tree, Call):
        return 1 + sum(size(a) for a in tree.args)
    return 1


def render(tree: ExprTree) -> str:
    """Deterministic prefix rendering, e.g. ``Mult(weight,Exp(-1.5))``."""
    if isinstance(tree, Var):
        return tree.name
    if isinstance(tree, Const):
        if tree.kind is D:
            return repr(float(tree.value))
        if tree.kind is I:
            return str(int(tree.value))
        if tree.kind is B:
            return "true" if tree.value else "false"
        return f'"{tree.value}"'
    return f"{tree.op.label}({','.join(render(a) for a in tree.args)})"


def iter_nodes(tree: ExprTree, _path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], ExprTree]]:
    """Preorder traversal yielding (path, node); the path is the sequence of
    child indices from the root."""
    yield _path, tree
    if isinstance(tree, Call):
        for i, a in enumerate(tree.args):
            yield from iter_nodes(a, _path + (i,))


def subtree_at(tree: ExprTree, path: tuple[int, ...]) -> ExprTree:
    node = tree
    for i in path:
        node = node.args[i]
    return node


def replace_at(tree: ExprTree, path: tuple[int, ...], sub: ExprTree) -> ExprTree:
    """Functional subtree replacement (trees are immutable)."""
    if not path:
        return sub
    head, rest = path[0], path[1:]
    args = list(tree.args)
    args[head] = replace_at(args[head], rest, sub)
    return Call(tree.op, tuple(args))


def check_well_typed(tree: ExprTree, spec: InterfaceSpec) -> None:
    """Raise ExprTypeError if the tree violates typing or references an
    unknown parameter."""
    if isinstance(tree, Var):
        try:
            p = spec.parameter(tree.name)
        except KeyError:
            raise UnboundVariableError(
                f"variable {tree.name!r} is not a declared parameter"
            ) from None
        if p.kind is not tree.kind:
            raise ExprTypeError(
                f"variable {tree.name!r} declared {p.kind.value}, "
                f"node claims {tree.kind.value}"
            )
        return
    if isinstance(tree, Const):
        v = tree.value
        ok = (
            (tree.kind is D and isinstance(v, (int, float)) and not isinstance(v, bool))
            or (tree.kind is I and isinstance(v, int) and not isinstance(v, bool))
            or (tree.kind is B and isinstance(v, bool))
            or (tree.kind is S and isinstance(v, str))
        )
        if not ok:
            raise ExprTypeError(f"constant {v!r} does not match kind {tree.kind.value}")
        return
    if len(tree.args) != tree.op.arity:
        raise ExprTypeError(
            f"{tree.op.name}: expected {tree.op.arity} children, got {len(tree.args)}"
        )
    for want, child in zip(tree.op.arg_kinds, tree.args):
        got = result_kind(child)
        if got is not want:
            raise ExprTypeError(
                f"{tree.op.name}: child of kind {got.value} where "
                f"{want.value} expected"
            )
        check_well_typed(child, spec)


def is_well_typed(tree: ExprTree, spec: InterfaceSpec) -> bool:
    try:
        check_well_typed(tree, spec)
    except ExprTypeError:
        return False
    return True


# --- random generation -----------------------------------------------------

def _string_constants(spec: InterfaceSpec) -> list[str]:
    out: list[str] = []
    for p in spec.parameters:
        if p.kind is S and p.values:
            for v in p.values:
                if v not in out:
                    out.append(v)
    return out


def _terminal_choices(kind: ValueKind, spec: InterfaceSpec) -> list:
    """Choice tokens for terminals of one kind: ('var', name), ('const', v)
    or ('ephemeral',)."""
    choices: list = [("var", p.name) for p in spec.parameters if p.kind is kind]
    if kind is D:
        choices.append(("const", -1.0))
        choices.append(("ephemeral",))
    elif kind is I:
        choices.append(("const", 0))
        choices.append(("ephemeral",))
    elif kind is B:
        choices.append(("const", True))
        choices.append(("const", False))
    else:
        choices.extend(("const", v) for v in _string_constants(spec))
    return choices


def _has_string_terminals(spec: InterfaceSpec) -> bool:
    return bool(_terminal_choices(S, spec))


def _operator_choices(kind: ValueKind, spec: InterfaceSpec) -> list[OperatorSignature]:
    ops = [op for op in OPERATORS if op.result_kind is kind]
    if not _has_string_terminals(spec):
        ops = [op for op in ops if S not in op.arg_kinds]
    return ops


def _materialize(choice, kind: ValueKind, rng) -> ExprTree:
    tag = choice[0]
    if tag == "var":
        return Var(choice[1], kind)
    if tag == "const":
        return Const(choice[1], kind)
    if kind is D:
        return Const(rng.uniform(*EPHEMERAL_RANGE), D, ephemeral=True)
    return Const(rng.choice(EPHEMERAL_INTEGERS), I, ephemeral=True)


def draw_terminal(kind: ValueKind, spec: InterfaceSpec, rng) -> ExprTree:
    """A uniformly drawn terminal of the requested kind."""
    choices = _terminal_choices(kind, spec)
    if not choices:
        raise ExprError(f"no terminals of kind {kind.value} are available")
    return _materialize(rng.choice(choices), kind, rng)


def random_tree(
    root_kind: ValueKind,
    max_depth: int,
    spec: InterfaceSpec,
    rng,
    method: str = "grow",
) -> ExprTree:
    """Generate a random well-typed tree with the given root kind.

    ``grow`` draws each node uniformly from terminals and operators; ``full``
    uses operators until the depth budget forces a leaf. The returned tree
    always satisfies depth(tree) <= max_depth.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    if method not in ("grow", "full"):
        raise ValueError(f"unknown method {method!r}")
    if root_kind is S and not _has_string_terminals(spec):
        raise ExprError("no string terminals available for a string-rooted tree")

    def gen(kind: ValueKind, budget: int) -> ExprTree:
        terminals = _terminal_choices(kind, spec)
        if budget <= 1:
            return _materialize(rng.choice(terminals), kind, rng)
        ops = _operator_choices(kind, spec)
        if method == "full":
            pool = ops if ops else terminals
        else:
            pool = terminals + ops
        pick = rng.choice(pool)
        if isinstance(pick, OperatorSignature):
            return Call(pick, tuple(gen(k, budget - 1) for k in pick.arg_kinds))
        return _materialize(pick, kind, rng)

    tree = gen(root_kind, max_depth)
    assert depth(tree) <= max_depth and result_kind(tree) is root_kind
    return tree


def ramped_half_and_half(
    count: int,
    root_kind: ValueKind,
    max_depth: int,
    spec: InterfaceSpec,
    rng,
) -> list[ExprTree]:
    """Standard initialization: alternate grow/full over depths 2..max_depth."""
    if max_depth < 2:
        return [random_tree(root_kind, 1, spec, rng) for _ in range(count)]
    depths = list(range(2, max_depth + 1))
    trees = []
    for i in range(count):
        d = depths[i % len(depths)]
        method = "full" if (i // len(depths)) % 2 == 0 else "grow"
        trees.append(random_tree(root_kind, d, spec, rng, method=method))
    return trees


# --- evaluation --------------------------------------------------------------

def evaluate(
    tree: ExprTree,
    binding,
    spec: InterfaceSpec,
    eq_tolerance: float = DEFAULT_EQ_TOLERANCE,
) -> EvalResult:
    """Evaluate a tree on one input vector under IEEE double semantics.

    Non-finite numeric outcomes are reported (finite=False), never masked.
    A tree referencing unknown or mistyped variables raises ExprTypeError.
    """
    import math

    from .program import EvalContext, compile_tree
    from .kernel import run_program

    ctx = EvalContext(spec)
    prog = compile_tree(tree, ctx, eq_tolerance=eq_tolerance)
    raw = float(run_program(prog.ops, prog.args, ctx.encode_batch([binding]), prog.stack_need)[0])
    kind = prog.result_kind
    if kind is D:
        return EvalResult(raw, math.isfinite(raw))
    if kind is I:
        if math.isfinite(raw):
            return EvalResult(int(raw), True)
        return EvalResult(raw, False)
    if kind is B:
        return EvalResult(raw != 0.0, True)
    return EvalResult(ctx.string_for_id(int(raw)), True)
