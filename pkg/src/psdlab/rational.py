"""Exact rational plumbing: wire format, rationalization ladders, square splitting.

All certificates travel as strings "p/q" so that exactness survives JSON.
Floating point is only ever a search device; everything emitted is a Fraction.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from sympy.solvers.diophantine.diophantine import sum_of_four_squares

# Denominator caps tried, in order, when snapping a float to a rational.
# Small caps first: certificates with small entries verify faster and read better.
DENOMINATOR_LADDER = (1, 4, 16, 64, 256, 1024, 10**4, 10**6, 10**9)


def format_rational(x: Fraction | int) -> str:
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def parse_rational(s: str) -> Fraction:
    """Parse "p/q" (or a plain integer/decimal string) into an exact Fraction."""
    if not isinstance(s, str):
        raise TypeError(f"rational must be a string, got {type(s).__name__}")
    return Fraction(s)


def rationalize(x: float, cap: int) -> Fraction:
    return Fraction(x).limit_denominator(cap)


def is_perfect_square(f: Fraction) -> bool:
    if f < 0:
        return False
    p, q = f.numerator, f.denominator
    return isqrt(p) ** 2 == p and isqrt(q) ** 2 == q


def sqrt_exact(f: Fraction) -> Fraction:
    p, q = f.numerator, f.denominator
    return Fraction(isqrt(p), isqrt(q))


def square_weights(lam: Fraction) -> list[Fraction]:
    """Split a non-negative rational as a sum of at most four rational squares.

    Returns [a_1, ..., a_m] with sum(a_i^2) == lam exactly.  Used to turn a
    weighted square lam * g^2 into plain squares (a_i * g)^2, so an exact
    weighted decomposition becomes an exact unweighted sum of squares.
    """
    if lam < 0:
        raise ValueError("weight must be non-negative")
    if lam == 0:
        return []
    if is_perfect_square(lam):
        return [sqrt_exact(lam)]
    p, q = lam.numerator, lam.denominator
    # lam = (p*q) / q^2; split the integer p*q into four integer squares.
    parts = sum_of_four_squares(p * q)
    out = [Fraction(a, q) for a in parts if a != 0]
    assert sum(a * a for a in out) == lam
    return out
