"""Feasibility engine: alternating projections between affine sets and the PSD cone.

Floating point lives here and only here; it proposes candidate matrices, which
are then snapped to rationals, repaired exactly onto the affine constraint,
and re-verified exactly before anything is emitted.  The affine projection is
orthogonal and has a closed diagonal form: the Gram map composed with its
adjoint is diagonal with the ordered-pair counts on the diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ..forms import Form
from ..gram import SymMat, gram_apply, pair_table
from ..monomials import MonomialOrder, degree_indices, ordered_basis
from ..psdcore import IndefiniteWitness, ldlt
from ..rational import DENOMINATOR_LADDER

RESIDUAL_TOL = 1e-9
MAX_ITER = 5000
SHIFT_LADDER = (1e-1, 1e-2, 1e-3, 0.0)


@lru_cache(maxsize=None)
def gram_layout(n: int, d: int, order: MonomialOrder = MonomialOrder.LEX_DESC):
    """Vectorized structure of the Gram map for (n, d) under an order.

    betas: the degree-2d indices in a fixed order; s/t/b/w arrays run over the
    upper triangle of the matrix; bidx is the full (k+1)x(k+1) table of target
    coefficient positions; counts[b] is the number of ordered pairs hitting b.
    """
    basis = ordered_basis(n, d, order)
    betas = tuple(sorted(degree_indices(n + 1, 2 * d), reverse=True))
    beta_pos = {b: i for i, b in enumerate(betas)}
    kp1 = basis.k + 1
    s_idx, t_idx, b_idx, w = [], [], [], []
    bidx = np.zeros((kp1, kp1), dtype=int)
    for s in range(kp1):
        for t in range(s, kp1):
            beta = tuple(x + y for x, y in zip(basis.entries[s], basis.entries[t]))
            pos = beta_pos[beta]
            s_idx.append(s)
            t_idx.append(t)
            b_idx.append(pos)
            w.append(1.0 if s == t else 2.0)
            bidx[s, t] = bidx[t, s] = pos
    counts = np.zeros(len(betas))
    np.add.at(counts, np.array(b_idx), np.array(w))
    return {
        "basis": basis,
        "betas": betas,
        "beta_pos": beta_pos,
        "s": np.array(s_idx),
        "t": np.array(t_idx),
        "b": np.array(b_idx),
        "w": np.array(w),
        "bidx": bidx,
        "counts": counts,
    }


def gram_to_coeffs_np(x: np.ndarray, layout) -> np.ndarray:
    y = np.zeros(len(layout["betas"]))
    np.add.at(y, layout["b"], x[layout["s"], layout["t"]] * layout["w"])
    return y


def form_to_vec(f: Form, layout) -> np.ndarray:
    y = np.zeros(len(layout["betas"]))
    for beta, c in f.coeffs.items():
        y[layout["beta_pos"][beta]] = float(c)
    return y


def fiber_project_np(x: np.ndarray, fvec: np.ndarray, layout) -> np.ndarray:
    """Orthogonal projection onto {A : gram(A) = f}; exact-form correction."""
    r = gram_to_coeffs_np(x, layout) - fvec
    w = r / layout["counts"]
    return x - w[layout["bidx"]]


def psd_project_np(x: np.ndarray, shift: float = 0.0) -> np.ndarray:
    """Projection onto {A >= shift*I}; LAPACK eigh (search only, never emitted)."""
    sym = (x + x.T) / 2.0
    if shift:
        sym = sym - shift * np.eye(sym.shape[0])
    lam, v = np.linalg.eigh(sym)
    out = (v * np.maximum(lam, 0.0)) @ v.T
    if shift:
        out = out + shift * np.eye(sym.shape[0])
    return out


@dataclass
class EngineResult:
    matrix: np.ndarray
    residual: float
    iterations: int
    converged: bool
    shift: float = 0.0
    params: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)


def dykstra(x0: np.ndarray, affine_project, shift: float,
            max_iter: int = MAX_ITER, tol: float = RESIDUAL_TOL,
            stall_window: int = 400) -> EngineResult:
    """Alternating projections with the Dykstra correction on the cone side.

    Returns the affine-feasible iterate; converged means its distance to the
    shifted PSD cone is below tol (relative to the matrix scale).
    """
    x = affine_project(x0)
    p = np.zeros_like(x)
    scale = max(1.0, float(np.linalg.norm(x, "fro")))
    best = np.inf
    best_at = 0
    res = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        y = psd_project_np(x + p, shift)
        p = x + p - y
        x = affine_project(y)
        res = float(np.linalg.norm(x - y, "fro")) / scale
        if res <= tol:
            return EngineResult(x, res, it, True, shift)
        if res < best * 0.97:
            best, best_at = res, it
        elif it - best_at > stall_window and res > 1e3 * tol:
            break
    return EngineResult(x, res, it, False, shift)


def dykstra_gram(f: Form, shift: float, order: MonomialOrder = MonomialOrder.LEX_DESC,
                 max_iter: int = MAX_ITER, tol: float = RESIDUAL_TOL,
                 start: np.ndarray | None = None) -> EngineResult:
    """Search the Gram fiber of f for a matrix with A >= shift*I."""
    layout = gram_layout(f.n, f.deg // 2, order)
    fvec = form_to_vec(f, layout)
    basis = layout["basis"]
    if start is None:
        from ..gram import canonical_gram

        start = canonical_gram(f, basis).to_numpy()
    return dykstra(start, lambda x: fiber_project_np(x, fvec, layout), shift, max_iter, tol)


def exact_fiber_repair(a: SymMat, f: Form, order: MonomialOrder = MonomialOrder.LEX_DESC) -> SymMat:
    """Exact orthogonal correction of a rational matrix onto the Gram fiber of f."""
    d = f.deg // 2
    basis = ordered_basis(f.n, d, order)
    diff = gram_apply(a, basis) - f
    if not diff:
        return a
    pairs, counts = pair_table(f.n, d, order)
    entries: dict[tuple[int, int], Fraction] = {}
    for beta, c in diff.coeffs.items():
        w = c / counts[beta]
        for s, t in pairs[beta]:
            entries[(s, t)] = w
    return a - SymMat.from_entries(a.dim, entries)


def certify_psd_in_fiber(arr: np.ndarray, f: Form, order: MonomialOrder = MonomialOrder.LEX_DESC,
                         ladder=DENOMINATOR_LADDER) -> SymMat | None:
    """Snap a float candidate to an exact PSD point of the Gram fiber, or fail.

    Tries the denominator ladder; each candidate is repaired exactly onto the
    fiber and accepted on an exact rational LDL^T pass.
    """
    for cap in ladder:
        a_q = exact_fiber_repair(SymMat.from_numpy(arr, cap), f, order)
        if not isinstance(ldlt(a_q, exact=True), IndefiniteWitness):
            return a_q
    return None


@dataclass
class AffineLift:
    """Affine set {S : gram_Z(S) = b + V theta} with cached projection data.

    The V columns may be linearly dependent (multiplier columns reproduce
    kernel columns exactly), so the projector uses an SVD with rank cutoff.
    Projections are orthogonal in the Frobenius metric of the matrix space,
    which in coefficient space is the 1/counts-weighted metric.
    """

    layout: dict
    b: np.ndarray
    v: np.ndarray          # (n_betas, n_params), possibly 0 columns

    def __post_init__(self):
        sqrt_n = np.sqrt(self.layout["counts"])
        self._sqrt_n = sqrt_n
        if self.v.shape[1]:
            vw = self.v / sqrt_n[:, None]
            u, sing, vt = np.linalg.svd(vw, full_matrices=False)
            cutoff = max(vw.shape) * np.finfo(float).eps * (sing[0] if sing.size else 0.0)
            rank = int(np.sum(sing > cutoff))
            self._u = u[:, :rank]
            self._pinv = (vt[:rank].T / sing[:rank]) @ u[:, :rank].T
        else:
            self._u = None
            self._pinv = None

    def solve_params(self, coeffs: np.ndarray) -> np.ndarray:
        if self._pinv is None:
            return np.zeros(0)
        return self._pinv @ ((coeffs - self.b) / self._sqrt_n)

    def project(self, s: np.ndarray) -> np.ndarray:
        coeffs = gram_to_coeffs_np(s, self.layout)
        rt = (coeffs - self.b) / self._sqrt_n
        if self._u is not None:
            rt = rt - self._u @ (self._u.T @ rt)
        w = rt / self._sqrt_n
        return s - w[self.layout["bidx"]]


def dykstra_lift(lift: AffineLift, start: np.ndarray, shift: float,
                 max_iter: int = MAX_ITER, tol: float = RESIDUAL_TOL) -> EngineResult:
    res = dykstra(start, lift.project, shift, max_iter, tol)
    coeffs = gram_to_coeffs_np(res.matrix, lift.layout)
    res.params = lift.solve_params(coeffs)
    return res
