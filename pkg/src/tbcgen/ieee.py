"""Scalar IEEE-754 helpers matching C99 libm semantics.

CPython's math module raises ValueError/OverflowError where C's pow, log,
cos and friends return NaN or an infinity. These wrappers translate the
exceptional paths back to the C results so the pure-Python kernel and the
builtin fixtures behave bit-for-bit like the compiled kernel (both end up
in the same libm for the non-exceptional paths).
"""

from __future__ import annotations

import math

INF = math.inf
NAN = math.nan


def _is_odd_integer(y: float) -> bool:
    return math.isfinite(y) and y == math.floor(y) and math.fmod(y, 2.0) != 0.0


def divide(x: float, y: float) -> float:
    try:
        return x / y
    except ZeroDivisionError:
        if x != x or x == 0.0:
            return NAN
        return math.copysign(INF, x) * math.copysign(1.0, y)


def power(x: float, y: float) -> float:
    try:
        return math.pow(x, y)
    except OverflowError:
        if x < 0.0 and _is_odd_integer(y):
            return -INF
        return INF
    except ValueError:
        if x == 0.0:
            # 0 raised to a negative power: IEEE divide-by-zero rules
            if math.copysign(1.0, x) < 0.0 and _is_odd_integer(y):
                return -INF
            return INF
        return NAN  # negative base, non-integer exponent


def root(x: float, y: float) -> float:
    return power(x, divide(1.0, y))


def log(x: float) -> float:
    try:
        return math.log(x)
    except ValueError:
        return -INF if x == 0.0 else NAN


def exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return INF


def cos(x: float) -> float:
    try:
        return math.cos(x)
    except ValueError:
        return NAN  # cos(+-inf)


def trunc(x: float) -> float:
    """Truncate toward zero; infinities and NaN pass through.

    C's trunc keeps the sign of zero (trunc(-0.5) is -0.0), which matters
    downstream of a division; math.trunc returns int 0 and drops it.
    """
    if math.isfinite(x):
        return math.copysign(float(math.trunc(x)), x)
    return x
