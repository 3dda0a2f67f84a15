"""Moment matrices from weighted points and the Riesz pairing.

A weighted point family gives the moment matrix M = sum c_r z_r z_r^T; when
every point is a monomial image of a base point the matrix is Veronese
supported and the coefficient sequence y reads off as weighted monomial
moments.  The Riesz functional pairs y against a form's coefficients exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..forms import Form
from ..gram import SymMat
from ..monomials import MonomialOrder, MultiIndex, degree_indices, monomial_eval, ordered_basis
from .certificates import DualPoint


@dataclass(frozen=True)
class MomentMatrix:
    n: int
    d: int
    matrix: SymMat
    points: tuple[DualPoint, ...]
    weights: tuple[Fraction, ...]
    y: Optional[dict[MultiIndex, Fraction]]   # moments, when all points are parametrized

    def to_json(self) -> dict:
        from ..rational import format_rational

        return {
            "kind": "moment",
            "n": self.n,
            "d": self.d,
            "matrix": self.matrix.to_json(),
            "points": [p.to_json() for p in self.points],
            "weights": [format_rational(w) for w in self.weights],
            "y": None if self.y is None else [
                {"alpha": list(a), "y": format_rational(v)} for a, v in sorted(self.y.items())
            ],
        }


def moment_from_points(points: list[DualPoint], weights: list[Fraction], n: int, d: int,
                       order: MonomialOrder = MonomialOrder.LEX_DESC) -> MomentMatrix:
    """M = sum c_r z_r z_r^T, exact; moments y when witnesses are available."""
    weights = [Fraction(w) for w in weights]
    if len(points) != len(weights):
        raise ValueError("points and weights must align")
    if any(w < 0 for w in weights):
        raise ValueError("weights must be non-negative")
    basis = ordered_basis(n, d, order)
    kp1 = basis.k + 1
    rows = [[Fraction(0)] * kp1 for _ in range(kp1)]
    for p, w in zip(points, weights):
        if len(p.z) != kp1:
            raise ValueError("point dimension mismatch")
        if w == 0:
            continue
        for s in range(kp1):
            if p.z[s] == 0:
                continue
            for t in range(kp1):
                if p.z[t] != 0:
                    rows[s][t] += w * p.z[s] * p.z[t]
    matrix = SymMat(tuple(tuple(row) for row in rows))
    y = None
    if all(p.x is not None for p in points):
        y = {}
        for a in degree_indices(n + 1, 2 * d):
            val = Fraction(0)
            for p, w in zip(points, weights):
                val += w * monomial_eval(a, p.x)
            y[tuple(a)] = val
    return MomentMatrix(n=n, d=d, matrix=matrix, points=tuple(points), weights=tuple(weights), y=y)


def riesz_apply(y: dict[MultiIndex, Fraction], g: Form) -> Fraction:
    """The exact pairing sum_a g_a y_a."""
    total = Fraction(0)
    for alpha, c in g.coeffs.items():
        if alpha not in y:
            raise ValueError(f"moment sequence has no entry for {alpha}")
        total += c * y[alpha]
    return total
