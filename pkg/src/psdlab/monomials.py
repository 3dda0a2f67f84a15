"""Multi-index combinatorics: degree-d exponent sets, monomial orders, bases.

A multi-index is a plain tuple of non-negative ints of length n+1 summing to
the ambient degree.  Bases are enumerated in *descending* order, so entry 0 is
X_0^d and the last entry is X_n^d under the lexicographic order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

MultiIndex = tuple[int, ...]


class MonomialOrder(enum.Enum):
    """Supported term orders on equal-degree multi-indices.

    LEX_DESC compares exponent tuples left to right.  EXAMPLE34 compares the
    key (a0+a1, a0, a2); it is a monomial order on up to four variables and is
    the alternative ternary ordering used for the ternary-decics filtration.
    """

    LEX_DESC = "lex"
    EXAMPLE34 = "example34"

    @classmethod
    def from_name(cls, name: str) -> "MonomialOrder":
        for member in cls:
            if member.value == name:
                return member
        raise ValueError(f"unknown monomial order {name!r} (expected 'lex' or 'example34')")


class Comparison(enum.IntEnum):
    LT = -1
    EQ = 0
    GT = 1


def _example34_key(alpha: MultiIndex) -> tuple[int, int, int]:
    a2 = alpha[2] if len(alpha) > 2 else 0
    return (alpha[0] + alpha[1], alpha[0], a2)


def compare(order: MonomialOrder, alpha: MultiIndex, beta: MultiIndex) -> Comparison:
    """Three-way comparison of two multi-indices of equal degree."""
    if len(alpha) != len(beta) or sum(alpha) != sum(beta):
        raise ValueError(f"cannot compare multi-indices of different shape/degree: {alpha} vs {beta}")
    if order is MonomialOrder.LEX_DESC:
        ka, kb = alpha, beta
    else:
        if len(alpha) > 4:
            raise ValueError("example34 order is only total on at most 4 variables")
        ka, kb = _example34_key(alpha), _example34_key(beta)
    if ka < kb:
        return Comparison.LT
    if ka > kb:
        return Comparison.GT
    if alpha != beta:
        raise ValueError(f"order does not separate {alpha} and {beta}")
    return Comparison.EQ


def sort_key(order: MonomialOrder, alpha: MultiIndex):
    if order is MonomialOrder.LEX_DESC:
        return alpha
    if len(alpha) > 4:
        raise ValueError("example34 order is only total on at most 4 variables")
    return _example34_key(alpha)


def k_of(n: int, d: int) -> int:
    """k(n,d) = C(n+d, n) - 1, the top index of the degree-d monomial basis."""
    if n < 1 or d < 1:
        raise ValueError("k_of requires n >= 1 and d >= 1")
    return comb(n + d, n) - 1


def degree_indices(nvars: int, d: int) -> list[MultiIndex]:
    """All exponent tuples of length nvars with entries summing to d."""
    if nvars == 1:
        return [(d,)]
    out = []
    for first in range(d, -1, -1):
        for rest in degree_indices(nvars - 1, d - first):
            out.append((first,) + rest)
    return out


@dataclass(frozen=True)
class OrderedBasis:
    """Degree-d monomial exponents of n+1 variables, sorted descending."""

    n: int
    d: int
    order: MonomialOrder
    entries: tuple[MultiIndex, ...]

    @property
    def k(self) -> int:
        return len(self.entries) - 1

    def index_of(self, alpha: MultiIndex) -> int:
        return self._lookup()[alpha]

    def _lookup(self) -> dict[MultiIndex, int]:
        return _basis_lookup(self.n, self.d, self.order)


@lru_cache(maxsize=None)
def ordered_basis(n: int, d: int, order: MonomialOrder = MonomialOrder.LEX_DESC) -> OrderedBasis:
    """Every degree-d multi-index of n+1 variables, greatest first."""
    if n < 1 or d < 1:
        raise ValueError("ordered_basis requires n >= 1 and d >= 1")
    entries = sorted(degree_indices(n + 1, d), key=lambda a: sort_key(order, a), reverse=True)
    basis = OrderedBasis(n=n, d=d, order=order, entries=tuple(entries))
    assert len(entries) == k_of(n, d) + 1
    return basis


@lru_cache(maxsize=None)
def _basis_lookup(n: int, d: int, order: MonomialOrder) -> dict[MultiIndex, int]:
    basis = ordered_basis(n, d, order)
    return {alpha: j for j, alpha in enumerate(basis.entries)}


def monomial_eval(alpha: MultiIndex, x) -> float | Fraction:
    """x^alpha with the 0^0 = 1 convention; exact when x is rational."""
    if len(alpha) != len(x):
        raise ValueError(f"point has {len(x)} coordinates, multi-index has {len(alpha)}")
    result = None
    for xi, ai in zip(x, alpha):
        if ai == 0:
            continue
        term = xi ** ai
        result = term if result is None else result * term
    if result is None:
        return 1
    return result


def monomial_vector(basis: OrderedBasis, x) -> list:
    return [monomial_eval(alpha, x) for alpha in basis.entries]
