"""Exact integer/rational parameter helpers shared by config and decoding."""

from fractions import Fraction
from typing import Union

from hypersketch.core.errors import ParameterError

Number = Union[int, Fraction]


def ceil_log2(x: Number) -> int:
    """Smallest k >= 0 with 2^k >= x (x > 0), computed exactly."""
    x = Fraction(x)
    if x <= 0:
        raise ParameterError(f"log2 of non-positive value {x}")
    if x <= 1:
        return 0
    k = (x.numerator // x.denominator).bit_length() - 1
    while Fraction(1 << k) < x:
        k += 1
    return k


def log_n(n: int) -> int:
    """The integer log n used throughout decoding (never below 1)."""
    return max(1, ceil_log2(n))


def set_error_parameter(eps: Number, n: int) -> Fraction:
    """eps* = eps / ceil(log2(n / eps))^2."""
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ParameterError(f"eps must lie in (0, 1), got {eps}")
    if n < 1:
        raise ParameterError(f"n must be positive, got {n}")
    divisor = max(1, ceil_log2(Fraction(n) / eps))
    return eps / (divisor * divisor)
