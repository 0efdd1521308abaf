"""Scalar helpers: exact rationals with a floating-point fallback.

Weights and distances are ``Fraction`` when every input was exact (integers
or p/q literals) and ``float`` otherwise.  Decimal literals are treated as
rounded measurements and parsed as floats unless ``exact=True`` forces a
Fraction reading.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Union

Value = Union[Fraction, float]

#: default absolute tolerance for float-mode comparisons
FLOAT_TOL = 1e-9


def parse_value(text: str, exact: bool = False) -> Value:
    """Parse an integer, p/q, or decimal literal."""
    text = text.strip()
    if "/" in text:
        return Fraction(text)
    try:
        return Fraction(int(text))
    except ValueError:
        pass
    if exact:
        return Fraction(text)
    return float(text)


def is_exact(values: Iterable[Value]) -> bool:
    return all(isinstance(v, (Fraction, int)) for v in values)


def as_float(value: Value) -> float:
    return float(value)


def values_close(a: Value, b: Value, tol: float = FLOAT_TOL) -> bool:
    """Exact equality when both sides are rational, tolerance otherwise."""
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(float(a) - float(b)) <= tol


def format_value(value: Value, precision: int = 6) -> str:
    """Render p/q for rationals, fixed significant digits for floats."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    return f"{float(value):.{precision}g}"


def exact_sqrt(value: Fraction) -> Fraction | None:
    """Square root of a nonnegative rational when it is itself rational."""
    if value < 0:
        return None
    num, den = value.numerator, value.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def sqrt_value(value: Value) -> Value:
    """Exact square root if possible, float otherwise."""
    if isinstance(value, Fraction):
        root = exact_sqrt(value)
        if root is not None:
            return root
    return math.sqrt(float(value))
