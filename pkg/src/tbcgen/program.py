"""Compilation of expression trees to a flat postfix tape.

The evaluation kernels (compiled or pure Python) interpret the tape over a
row-major float64 matrix of encoded inputs. All value kinds are carried as
doubles: integers as integral doubles, booleans as 0/1, strings as interned
ids. This keeps the hot loop branch-free of Python objects while preserving
the tree semantics exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr
from .expr import (
    Call,
    Const,
    DEFAULT_EQ_TOLERANCE,
    ExprTree,
    ExprTypeError,
    UnboundVariableError,
    Var,
)
from .spec_io import InterfaceSpec, ValueKind

# Opcode numbering is shared with the kernels; the cross-backend parity tests
# exercise every opcode, so any drift shows up immediately.
OP_PUSH_CONST = 0
OP_PUSH_VAR = 1
OP_ADD = 2
OP_SUB = 3
OP_MUL = 4
OP_DIV = 5
OP_POW = 6
OP_ROOT = 7
OP_COS = 8
OP_EXP = 9
OP_LOG = 10
OP_CAST_D2I = 11
OP_CAST_I2D = 12
OP_AND = 13
OP_OR = 14
OP_LT = 15
OP_GT = 16
OP_EQ_BOOL = 17
OP_EQ_ARITH = 18
OP_EQ_STR = 19
OP_IFTE = 20

_NAME_TO_OPCODE = {
    "add": OP_ADD,
    "subtract": OP_SUB,
    "multiply": OP_MUL,
    "divide": OP_DIV,
    "power": OP_POW,
    "root": OP_ROOT,
    "cos": OP_COS,
    "exp": OP_EXP,
    "log": OP_LOG,
    "cast_to_int": OP_CAST_D2I,
    "cast_to_double": OP_CAST_I2D,
    "and": OP_AND,
    "or": OP_OR,
    "lt": OP_LT,
    "gt": OP_GT,
    "eq_bool": OP_EQ_BOOL,
    "eq_arith": OP_EQ_ARITH,
    "eq_string": OP_EQ_STR,
    "if_double": OP_IFTE,
    "if_int": OP_IFTE,
    "if_bool": OP_IFTE,
    "if_string": OP_IFTE,
}


class EvalContext:
    """Per-spec encoding state: column layout and string interning.

    One context is shared by all compilations and encodings within a
    training set, pool, or campaign, so interned string ids stay coherent.
    """

    def __init__(self, spec: InterfaceSpec):
        self.spec = spec
        self.columns = {p.name: i for i, p in enumerate(spec.parameters)}
        self.kinds = tuple(p.kind for p in spec.parameters)
        self._string_ids: dict[str, int] = {}
        self._strings: list[str] = []
        for p in spec.parameters:
            if p.kind is ValueKind.STRING:
                for v in p.values:
                    self.intern(v)

    def intern(self, value: str) -> int:
        sid = self._string_ids.get(value)
        if sid is None:
            sid = len(self._strings)
            self._string_ids[value] = sid
            self._strings.append(value)
        return sid

    def string_for_id(self, sid: int) -> str:
        return self._strings[sid]

    def encode_value(self, kind: ValueKind, v) -> float:
        if kind is ValueKind.DOUBLE:
            return float(v)
        if kind is ValueKind.INTEGER:
            return float(int(v))
        if kind is ValueKind.BOOLEAN:
            return 1.0 if v else 0.0
        return float(self.intern(v))

    def encode_input(self, values) -> np.ndarray:
        if len(values) != len(self.kinds):
            raise ValueError(
                f"expected {len(self.kinds)} values, got {len(values)}"
            )
        return np.array(
            [self.encode_value(k, v) for k, v in zip(self.kinds, values)],
            dtype=np.float64,
        )

    def encode_batch(self, rows) -> np.ndarray:
        rows = list(rows)
        if not rows:
            return np.empty((0, len(self.kinds)), dtype=np.float64)
        return np.ascontiguousarray([self.encode_input(r) for r in rows])


@dataclass(frozen=True, eq=False)
class Program:
    """A compiled tree: opcode tape, per-instruction operand, stack budget."""

    ops: np.ndarray
    args: np.ndarray
    stack_need: int
    result_kind: ValueKind


def compile_tree(
    tree: ExprTree,
    ctx: EvalContext,
    eq_tolerance: float = DEFAULT_EQ_TOLERANCE,
) -> Program:
    """Flatten a well-typed tree into postfix form.

    Raises UnboundVariableError / ExprTypeError for malformed trees; numeric
    edge conditions are the kernels' business, not the compiler's.
    """
    ops: list[int] = []
    args: list[float] = []
    depth = 0
    max_depth = 0

    def push(op: int, arg: float, delta: int):
        nonlocal depth, max_depth
        ops.append(op)
        args.append(arg)
        depth += delta
        if depth > max_depth:
            max_depth = depth

    def walk(node: ExprTree):
        if isinstance(node, Var):
            col = ctx.columns.get(node.name)
            if col is None:
                raise UnboundVariableError(
                    f"variable {node.name!r} is not a declared parameter"
                )
            if ctx.kinds[col] is not node.kind:
                raise ExprTypeError(
                    f"variable {node.name!r} declared "
                    f"{ctx.kinds[col].value}, node claims {node.kind.value}"
                )
            push(OP_PUSH_VAR, float(col), +1)
        elif isinstance(node, Const):
            push(OP_PUSH_CONST, ctx.encode_value(node.kind, node.value), +1)
        else:
            if len(node.args) != node.op.arity:
                raise ExprTypeError(
                    f"{node.op.name}: expected {node.op.arity} children, "
                    f"got {len(node.args)}"
                )
            for want, child in zip(node.op.arg_kinds, node.args):
                if expr.result_kind(child) is not want:
                    raise ExprTypeError(
                        f"{node.op.name}: child of kind "
                        f"{expr.result_kind(child).value} where {want.value} expected"
                    )
                walk(child)
            opcode = _NAME_TO_OPCODE[node.op.name]
            arg = eq_tolerance if opcode == OP_EQ_ARITH else 0.0
            push(opcode, arg, 1 - node.op.arity)

    walk(tree)
    assert depth == 1
    return Program(
        ops=np.asarray(ops, dtype=np.int64),
        args=np.asarray(args, dtype=np.float64),
        stack_need=max_depth,
        result_kind=expr.result_kind(tree),
    )
