# cython: boundscheck=False, wraparound=False, initializedcheck=False
# cython: cdivision=True, language_level=3
"""Compiled evaluation kernel.

Interprets program tapes over encoded input matrices with plain C doubles,
releasing the GIL across rows. IEEE special cases (division by zero, domain
errors of pow/log/cos) fall straight out of C99 semantics, which is why the
extension must not be compiled with -ffast-math.
"""

from libc.math cimport cos, exp, fabs, isfinite, log, pow, trunc
from libc.stdlib cimport free, malloc

import numpy as np

DEF OP_PUSH_CONST = 0
DEF OP_PUSH_VAR = 1
DEF OP_ADD = 2
DEF OP_SUB = 3
DEF OP_MUL = 4
DEF OP_DIV = 5
DEF OP_POW = 6
DEF OP_ROOT = 7
DEF OP_COS = 8
DEF OP_EXP = 9
DEF OP_LOG = 10
DEF OP_CAST_D2I = 11
DEF OP_CAST_I2D = 12
DEF OP_AND = 13
DEF OP_OR = 14
DEF OP_LT = 15
DEF OP_GT = 16
DEF OP_EQ_BOOL = 17
DEF OP_EQ_ARITH = 18
DEF OP_EQ_STR = 19
DEF OP_IFTE = 20


cdef inline double _eval_row(
    const long long* ops,
    const double* args,
    Py_ssize_t nops,
    const double* row,
    double* stack,
) noexcept nogil:
    cdef Py_ssize_t sp = 0, k
    cdef long long op
    cdef double a, b, m, aa
    for k in range(nops):
        op = ops[k]
        if op == OP_PUSH_VAR:
            stack[sp] = row[<Py_ssize_t> args[k]]
            sp += 1
        elif op == OP_PUSH_CONST:
            stack[sp] = args[k]
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
            stack[sp - 1] = stack[sp - 1] / stack[sp]
        elif op == OP_POW:
            sp -= 1
            stack[sp - 1] = pow(stack[sp - 1], stack[sp])
        elif op == OP_ROOT:
            sp -= 1
            stack[sp - 1] = pow(stack[sp - 1], 1.0 / stack[sp])
        elif op == OP_COS:
            stack[sp - 1] = cos(stack[sp - 1])
        elif op == OP_EXP:
            stack[sp - 1] = exp(stack[sp - 1])
        elif op == OP_LOG:
            stack[sp - 1] = log(stack[sp - 1])
        elif op == OP_CAST_D2I:
            stack[sp - 1] = trunc(stack[sp - 1])
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
            m = 1.0
            aa = fabs(a)
            if aa > m:
                m = aa
            aa = fabs(b)
            if aa > m:
                m = aa
            stack[sp - 1] = 1.0 if fabs(a - b) <= args[k] * m else 0.0
        elif op == OP_EQ_STR:
            sp -= 1
            stack[sp - 1] = 1.0 if stack[sp - 1] == stack[sp] else 0.0
        elif op == OP_IFTE:
            sp -= 2
            if stack[sp - 1] != 0.0:
                stack[sp - 1] = stack[sp]
            else:
                stack[sp - 1] = stack[sp + 1]
    return stack[0]


def run_program(ops, args, x, int stack_need):
    """Evaluate one program over every row of the encoded input matrix."""
    cdef const long long[::1] ops_v = np.ascontiguousarray(ops, dtype=np.int64)
    cdef const double[::1] args_v = np.ascontiguousarray(args, dtype=np.float64)
    cdef const double[:, ::1] x_v = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = x_v.shape[0]
    cdef Py_ssize_t nops = ops_v.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] out_v = out
    if n == 0:
        return out
    if stack_need < 1:
        stack_need = 1
    cdef double* stack = <double*> malloc(stack_need * sizeof(double))
    if stack == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    try:
        with nogil:
            for i in range(n):
                out_v[i] = _eval_row(&ops_v[0], &args_v[0], nops, &x_v[i, 0], stack)
    finally:
        free(stack)
    return out
