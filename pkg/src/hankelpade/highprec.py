"""Configurable-precision binary floats (GMP/MPFR through gmpy2)."""

from __future__ import annotations

import math
from contextlib import contextmanager
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

DEFAULT_DIGITS = 256
MIN_DIGITS = 50

HighPrecFloat = type(mpfr(0))


def digits_to_bits(digits: int) -> int:
    # a few guard bits so that `digits` decimals are always representable
    return math.ceil(digits * math.log2(10)) + 8


@contextmanager
def working_precision(digits: int = DEFAULT_DIGITS):
    """Run the enclosed block with MPFR precision of ``digits`` decimals."""
    if digits < MIN_DIGITS:
        raise ValueError(f"precision must be at least {MIN_DIGITS} digits, got {digits}")
    with gmpy2.context(gmpy2.get_context(), precision=digits_to_bits(digits)) as ctx:
        yield ctx


def to_hp(x, digits: int | None = None, bits: int | None = None) -> HighPrecFloat:
    """Correctly rounded conversion of an exact value (int, Fraction, str).

    Precision is ``bits`` if given, else ``digits`` decimals, else the
    active context.
    """
    if bits is None:
        bits = digits_to_bits(digits) if digits else gmpy2.get_context().precision
    if isinstance(x, Fraction):
        return mpfr(gmpy2.mpq(x.numerator, x.denominator), bits)
    if isinstance(x, str) and "/" in x:
        return to_hp(Fraction(x), bits=bits)
    return mpfr(x, bits)


def to_fraction(x: HighPrecFloat) -> Fraction:
    """Exact value of a binary float."""
    n, d = x.as_integer_ratio()
    return Fraction(int(n), int(d))


def log10_abs(x) -> float:
    """log10|x| as a float; ``-inf`` for an exact zero."""
    if isinstance(x, Fraction):
        if x == 0:
            return float("-inf")
        return (math.log10(abs(x.numerator)) if abs(x.numerator) < 10**300 else _bigint_log10(abs(x.numerator))) - (
            math.log10(x.denominator) if x.denominator < 10**300 else _bigint_log10(x.denominator)
        )
    if x == 0:
        return float("-inf")
    return float(gmpy2.log10(abs(mpfr(x))))


def _bigint_log10(n: int) -> float:
    shift = max(n.bit_length() - 64, 0)
    return math.log10(n >> shift) + shift * math.log10(2)
