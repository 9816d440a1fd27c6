"""Pure-Python evaluation kernel.

Reference interpreter for compiled program tapes. Semantics match the
compiled kernel exactly (same libm, same IEEE special-case handling via the
ieee helpers); the cross-backend parity tests assert bitwise agreement on
finite results. It is selected automatically when the compiled extension is
unavailable.
"""

from __future__ import annotations

import numpy as np

from . import ieee
from .program import (
    OP_ADD,
    OP_AND,
    OP_CAST_D2I,
    OP_CAST_I2D,
    OP_COS,
    OP_DIV,
    OP_EQ_ARITH,
    OP_EQ_BOOL,
    OP_EQ_STR,
    OP_EXP,
    OP_GT,
    OP_IFTE,
    OP_LOG,
    OP_LT,
    OP_MUL,
    OP_OR,
    OP_POW,
    OP_PUSH_CONST,
    OP_PUSH_VAR,
    OP_ROOT,
    OP_SUB,
)


def run_program(ops, args, x, stack_need: int) -> np.ndarray:
    """Evaluate one program over every row of the encoded input matrix."""
    ops_l = [int(o) for o in ops]
    args_l = [float(a) for a in args]
    code = list(zip(ops_l, args_l))
    rows = np.asarray(x, dtype=np.float64).tolist()
    out = np.empty(len(rows), dtype=np.float64)
    stack = [0.0] * max(stack_need, 1)

    for r, row in enumerate(rows):
        sp = 0
        for op, arg in code:
            if op == OP_PUSH_VAR:
                stack[sp] = row[int(arg)]
                sp += 1
            elif op == OP_PUSH_CONST:
                stack[sp] = arg
                sp += 1
            elif op == OP_ADD:
                sp -= 1
                stack[sp - 1] = stack[sp - 1] + stack[sp]
            elif op == OP_SUB:
                sp -= 1
                stack[sp - 1] = stack[sp - 1] - stack[sp]
            elif op == OP_MUL:
                sp -= 1
                stack[sp - 1] = stack[sp - 1] * stack[sp]
            elif op == OP_DIV:
                sp -= 1
                stack[sp - 1] = ieee.divide(stack[sp - 1], stack[sp])
            elif op == OP_POW:
                sp -= 1
                stack[sp - 1] = ieee.power(stack[sp - 1], stack[sp])
            elif op == OP_ROOT:
                sp -= 1
                stack[sp - 1] = ieee.root(stack[sp - 1], stack[sp])
            elif op == OP_COS:
                stack[sp - 1] = ieee.cos(stack[sp - 1])
            elif op == OP_EXP:
                stack[sp - 1] = ieee.exp(stack[sp - 1])
            elif op == OP_LOG:
                stack[sp - 1] = ieee.log(stack[sp - 1])
            elif op == OP_CAST_D2I:
                stack[sp - 1] = ieee.trunc(stack[sp - 1])
            elif op == OP_CAST_I2D:
                pass
            elif op == OP_AND:
                sp -= 1
                stack[sp - 1] = 1.0 if (stack[sp - 1] != 0.0 and stack[sp] != 0.0) else 0.0
            elif op == OP_OR:
                sp -= 1
                stack[sp - 1] = 1.0 if (stack[sp - 1] != 0.0 or stack[sp] != 0.0) else 0.0
            elif op == OP_LT:
                sp -= 1
                stack[sp - 1] = 1.0 if stack[sp - 1] < stack[sp] else 0.0
            elif op == OP_GT:
                sp -= 1
                stack[sp - 1] = 1.0 if stack[sp - 1] > stack[sp] else 0.0
            elif op == OP_EQ_BOOL:
                sp -= 1
                stack[sp - 1] = 1.0 if (stack[sp - 1] != 0.0) == (stack[sp] != 0.0) else 0.0
            elif op == OP_EQ_ARITH:
                sp -= 1
                a = stack[sp - 1]
                b = stack[sp]
                # scan order mirrors C fmax: NaN never wins
                m = 1.0
                aa = abs(a)
                if aa > m:
                    m = aa
                ab = abs(b)
                if ab > m:
                    m = ab
                stack[sp - 1] = 1.0 if abs(a - b) <= arg * m else 0.0
            elif op == OP_EQ_STR:
                sp -= 1
                stack[sp - 1] = 1.0 if stack[sp - 1] == stack[sp] else 0.0
            elif op == OP_IFTE:
                sp -= 2
                if stack[sp - 1] == 0.0:
                    stack[sp - 1] = stack[sp + 1]
                else:
                    stack[sp - 1] = stack[sp]
            else:
                raise ValueError(f"unknown opcode {op}")
        out[r] = stack[0]
    return out
