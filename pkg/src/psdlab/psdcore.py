"""Dense symmetric spectral tools and the equivalent PSD criteria.

Eigenvalues come from a deterministic cyclic Jacobi sweep; semidefiniteness
can also be decided by a pivoted LDL^T (exact over the rationals, with an
explicit indefiniteness witness on failure) or by exact principal minors.
A cross-check mode runs all applicable criteria and treats any decisive
disagreement as a bug, never as data.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import sqrt
from typing import Optional, Union

import numpy as np

from .exactla import determinant
from .gram import SymMat

PSD_TOL = 1e-9  # lambda_min >= -PSD_TOL * max(1, ||A||) counts as PSD
LDLT_PIVOT_TOL = 1e-12
JACOBI_SWEEPS = 30
JACOBI_TOL = 1e-12


class JacobiConvergenceError(RuntimeError):
    """Raised when the sweep cap is hit before the off-diagonal mass dies."""


class PsdDisagreementError(RuntimeError):
    """Two decisive PSD criteria disagreed; per their equivalence this is a bug."""


def _fro(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, "fro"))


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple[float, ...]       # descending
    eigenvectors: np.ndarray             # orthonormal columns, aligned

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return v @ np.diag(self.eigenvalues) @ v.T


def _to_array(a) -> np.ndarray:
    if isinstance(a, SymMat):
        return a.to_numpy()
    arr = np.array(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("need a square matrix")
    if not np.allclose(arr, arr.T, atol=1e-10 * max(1.0, _fro(arr))):
        raise ValueError("matrix is not symmetric")
    return (arr + arr.T) / 2.0


def eigen_sym(a, max_sweeps: int = JACOBI_SWEEPS) -> Spectrum:
    """Full spectral decomposition by cyclic Jacobi rotations.

    Fixed (p, q) sweep order, so the result is deterministic; converged when
    the off-diagonal mass falls below JACOBI_TOL * ||A||.  Hitting the sweep
    cap without converging raises JacobiConvergenceError with diagnostics.
    """
    m = _to_array(a).copy()
    n = m.shape[0]
    v = np.eye(n)
    norm = max(_fro(m), 1e-300)
    tol = JACOBI_TOL * norm

    def off_mass() -> float:
        off = m - np.diag(np.diag(m))
        return _fro(off)

    for _ in range(max_sweeps):
        if off_mass() <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                if abs(apq) <= tol / max(n * n, 1):
                    continue
                theta = (m[q, q] - m[p, p]) / (2.0 * apq)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + sqrt(theta * theta + 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                app, aqq = m[p, p], m[q, q]
                col_p, col_q = m[:, p].copy(), m[:, q].copy()
                new_p = c * col_p - s * col_q
                new_q = s * col_p + c * col_q
                m[:, p], m[:, q] = new_p, new_q
                m[p, :], m[q, :] = m[:, p], m[:, q]
                m[p, p] = c * c * app - 2 * s * c * apq + s * s * aqq
                m[q, q] = s * s * app + 2 * s * c * apq + c * c * aqq
                m[p, q] = m[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    if off_mass() > tol:
        raise JacobiConvergenceError(
            f"off-diagonal mass {off_mass():.3e} above {tol:.3e} after {max_sweeps} sweeps (dim {n})")
    order = sorted(range(n), key=lambda i: (-m[i, i], i))
    eigs = tuple(float(m[i, i]) for i in order)
    return Spectrum(eigenvalues=eigs, eigenvectors=v[:, order])


@dataclass(frozen=True)
class LdltFactorization:
    """P A P^T = L D L^T with unit lower L and non-negative diagonal D."""

    perm: tuple[int, ...]
    lower: list
    diag: list


@dataclass(frozen=True)
class IndefiniteWitness:
    vector: tuple                     # w with w^T A w < 0
    value: object                     # w^T A w, Fraction in exact mode

    def rayleigh(self) -> float:
        w = np.array([float(x) for x in self.vector])
        return float(self.value) / float(w @ w)


LdltResult = Union[LdltFactorization, IndefiniteWitness]


def ldlt(a, exact: Optional[bool] = None) -> LdltResult:
    """Pivoted semidefinite LDL^T; returns a factorization or a witness.

    Pivots on the largest remaining diagonal.  A negative pivot, or a zero
    diagonal facing a nonzero off-diagonal entry, yields an explicit vector w
    with w^T A w < 0 through the accumulated congruence.  In exact mode every
    comparison is rational, so the outcome is a proof either way.
    """
    if exact is None:
        exact = isinstance(a, SymMat)
    if exact:
        rows0 = a.rows if isinstance(a, SymMat) else [[Fraction(v) for v in row] for row in a]
        work = [[Fraction(v) for v in row] for row in rows0]
        tol = Fraction(0)
        one, zero = Fraction(1), Fraction(0)
    else:
        arr = _to_array(a)
        rows0 = [[float(v) for v in row] for row in arr]
        work = [row[:] for row in rows0]
        tol = LDLT_PIVOT_TOL * max(1.0, _fro(arr))
        one, zero = 1.0, 0.0
    n = len(work)
    # cong[i]: the current coordinate i expressed in original coordinates, so
    # that the active Schur block satisfies S[i][j] = cong[i] A cong[j]^T.
    cong = [[one if i == j else zero for j in range(n)] for i in range(n)]
    remaining = list(range(n))
    perm: list[int] = []
    diag: list = []
    lcols: list[tuple[int, list]] = []

    def witness_from(coeffs: dict[int, object]) -> IndefiniteWitness:
        w = [zero] * n
        for idx, cf in coeffs.items():
            for j in range(n):
                w[j] += cf * cong[idx][j]
        value = zero
        for i in range(n):
            if w[i] == 0:
                continue
            for j in range(n):
                if w[j] != 0:
                    value += w[i] * rows0[i][j] * w[j]
        return IndefiniteWitness(vector=tuple(w), value=value)

    while remaining:
        piv = max(remaining, key=lambda i: (work[i][i], -i))
        if work[piv][piv] > tol:
            remaining.remove(piv)
            perm.append(piv)
            d = work[piv][piv]
            diag.append(d)
            mults = [(r, work[r][piv] / d) for r in remaining]
            for r, lr in mults:
                if lr == 0:
                    continue
                for c, lc in mults:
                    work[r][c] -= lr * d * lc
                for j in range(n):
                    cong[r][j] -= lr * cong[piv][j]
            lcols.append((piv, mults))
            continue
        neg = min(remaining, key=lambda i: (work[i][i], i))
        if work[neg][neg] < -tol:
            return witness_from({neg: one})
        off = None
        for r in remaining:
            for c in remaining:
                if c > r and not (-tol <= work[r][c] <= tol):
                    off = (r, c)
                    break
            if off:
                break
        if off is None:
            for r in remaining:
                perm.append(r)
                diag.append(zero)
                lcols.append((r, []))
            break
        r, c = off
        sign = one if work[r][c] > 0 else -one
        return witness_from({r: one, c: -sign})

    size = len(perm)
    pos = {p: i for i, p in enumerate(perm)}
    lower = [[one if i == j else zero for j in range(size)] for i in range(size)]
    for p, mults in lcols:
        for r, lr in mults:
            lower[pos[r]][pos[p]] = lr
    return LdltFactorization(perm=tuple(perm), lower=lower, diag=diag)


def is_psd_exact(a: SymMat) -> bool:
    """Exact semidefiniteness via rational LDL^T."""
    return isinstance(ldlt(a, exact=True), LdltFactorization)


def principal_minors_nonneg(a, max_dim: int = 8) -> bool:
    """Every principal minor >= 0, by exact rational determinants."""
    rows = _exact_rows(a)
    n = len(rows)
    if n > max_dim:
        raise ValueError(f"principal-minor check capped at dim {max_dim}, got {n}")
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            sub = [[rows[i][j] for j in subset] for i in subset]
            if determinant(sub) < 0:
                return False
    return True


def _exact_rows(a) -> list[list[Fraction]]:
    if isinstance(a, SymMat):
        return [list(row) for row in a.rows]
    arr = _to_array(a)
    return [[Fraction(float(v)) for v in row] for row in arr]


def _most_negative_minor(rows: list[list[Fraction]]) -> Fraction:
    n = len(rows)
    worst = Fraction(0)
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            sub = [[rows[i][j] for j in subset] for i in subset]
            det = determinant(sub)
            if det < worst:
                worst = det
    return worst


@dataclass
class PsdVerdict:
    is_psd: bool
    mode: str
    evidence: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.is_psd


def is_psd(a, mode: str = "cross_check") -> PsdVerdict:
    """PSD test by one criterion or by cross-checking all applicable ones.

    Float verdicts use the band lambda_min >= -PSD_TOL * max(1, ||A||); a
    verdict is decisive when its margin clears the band.  Decisive criteria
    disagreeing raises PsdDisagreementError: by their equivalence that can
    only mean a bug, never information about the matrix.
    """
    arr = _to_array(a)
    n = arr.shape[0]
    band = PSD_TOL * max(1.0, _fro(arr))

    def eigen_check():
        lam = eigen_sym(arr).eigenvalues[-1]
        return lam >= -band, lam, abs(lam) > band

    def ldlt_check():
        res = ldlt(arr, exact=False)
        if isinstance(res, LdltFactorization):
            margin = float(min(res.diag)) if res.diag else 0.0
            return True, margin, True
        margin = res.rayleigh()
        return margin >= -band, margin, abs(margin) > band

    def minors_check():
        worst = _most_negative_minor(_exact_rows(a))
        if worst == 0:
            return True, 0.0, True
        # Interlacing: a minor of value -|m| forces lambda_min <= -|m|/||A||^(r-1).
        bound = -abs(float(worst)) / max(1.0, _fro(arr)) ** (n - 1)
        return bound >= -band, bound, bound < -band

    checks = {"eigen": eigen_check, "ldlt": ldlt_check, "minors": minors_check}
    if mode in checks:
        if mode == "minors" and n > 8:
            raise ValueError("principal-minor mode capped at dim 8")
        ok, margin, _ = checks[mode]()
        return PsdVerdict(ok, mode, {"margin": margin})
    if mode != "cross_check":
        raise ValueError(f"unknown mode {mode!r}")

    results = {}
    for name, fn in checks.items():
        if name == "minors" and n > 8:
            continue
        results[name] = fn()
    decisive = {name: r for name, r in results.items() if r[2]}
    verdicts = {r[0] for r in decisive.values()}
    if len(verdicts) > 1:
        raise PsdDisagreementError(
            "criteria disagree decisively: "
            + ", ".join(f"{k}: psd={v[0]} margin={v[1]:.3e}" for k, v in results.items()))
    if decisive:
        final = next(iter(verdicts))
    else:
        final = all(r[0] for r in results.values())
    return PsdVerdict(final, "cross_check", {k: {"psd": v[0], "margin": v[1]} for k, v in results.items()})


def psd_project(a) -> np.ndarray:
    """Nearest PSD matrix in Frobenius norm: clip negative eigenvalues."""
    spec = eigen_sym(a)
    lam = np.maximum(np.array(spec.eigenvalues), 0.0)
    v = spec.eigenvectors
    return (v * lam) @ v.T


def factor_psd(a) -> tuple[np.ndarray, list[tuple[float, np.ndarray]]]:
    """A = U^T U and the point-mass form sum lam_i y_i^T y_i, from the spectrum."""
    arr = _to_array(a)
    spec = eigen_sym(arr)
    band = PSD_TOL * max(1.0, _fro(arr))
    if spec.eigenvalues[-1] < -band:
        raise ValueError(f"matrix is not PSD (lambda_min = {spec.eigenvalues[-1]:.3e})")
    lam = np.maximum(np.array(spec.eigenvalues), 0.0)
    v = spec.eigenvectors
    u = np.diag(np.sqrt(lam)) @ v.T
    masses = [(float(l), v[:, i].copy()) for i, l in enumerate(lam) if l > 0]
    return u, masses
