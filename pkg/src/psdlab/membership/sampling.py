"""Point sampling: variety points with exact witnesses, and sphere minimization.

hi_sample draws rational points of the level-i parametrized set: the leading
coordinates are monomials of a random rational base point, the trailing ones
are free.  psd_sample_test is the one-sided PSD probe: multistart projected
gradient descent on the unit sphere plus a deterministic grid; a negative
value refutes, a positive minimum is only evidence.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..forms import Form
from ..gram import FiltrationDescriptor
from ..monomials import monomial_eval, ordered_basis
from .certificates import DualPoint


def _rational_gauss(rng: random.Random, den: int = 16) -> Fraction:
    return Fraction(round(rng.gauss(0.0, 1.0) * den), den)


def _sample_base_point(rng: random.Random, nvars: int, family: int) -> tuple[Fraction, ...]:
    while True:
        if family == 0:      # rounded gaussian
            x = tuple(_rational_gauss(rng) for _ in range(nvars))
        elif family == 1:    # sign patterns
            x = tuple(Fraction(rng.choice((-1, 1))) for _ in range(nvars))
        else:                # sparse support
            x = tuple(_rational_gauss(rng) if rng.random() < 0.6 else Fraction(0) for _ in range(nvars))
        if any(v != 0 for v in x):
            return x


def _unitize(x: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    norm = math.sqrt(sum(float(v) ** 2 for v in x))
    mu = Fraction(1.0 / norm).limit_denominator(32)
    if mu == 0:
        mu = Fraction(1)
    return tuple(mu * v for v in x)


def hi_sample(descriptor: FiltrationDescriptor, level: int, seed: int, count: int) -> list[DualPoint]:
    """Points of the level-i set, each with its exact parametrization witness.

    The leading block is the monomial image of a random rational base point;
    the free tail is random.  At level 0 the parametrized set is everything,
    so half the emitted points are fully arbitrary (witness-free).
    """
    basis = ordered_basis(descriptor.n, descriptor.d, descriptor.order)
    fixed = descriptor.fixed_coordinates(level)
    kp1 = basis.k + 1
    rng = random.Random(f"hi:{seed}:{descriptor.n}:{descriptor.d}:{descriptor.order.value}:{level}")
    points = []
    for idx in range(count):
        if level == 0 and idx % 2 == 1:
            z = tuple(_rational_gauss(rng) for _ in range(kp1))
            if all(v == 0 for v in z):
                z = (Fraction(1),) + z[1:]
            points.append(DualPoint(z=z, x=None))
            continue
        x = _unitize(_sample_base_point(rng, descriptor.n + 1, idx % 3))
        lead = [Fraction(monomial_eval(alpha, x)) for alpha in basis.entries[:fixed]]
        tail = [_rational_gauss(rng) for _ in range(kp1 - fixed)]
        points.append(DualPoint(z=tuple(lead + tail), x=x))
    return points


@dataclass
class SampleReport:
    min_value: float
    argmin: tuple[float, ...]
    refuted: bool
    evidence: dict = field(default_factory=dict)


def _gradient(f: Form, x: np.ndarray) -> np.ndarray:
    g = np.zeros_like(x)
    for alpha, c in f.coeffs.items():
        fc = float(c)
        for i, ai in enumerate(alpha):
            if ai == 0:
                continue
            term = fc * ai
            for j, aj in enumerate(alpha):
                e = aj - 1 if j == i else aj
                if e:
                    term *= x[j] ** e
            g[i] += term
    return g


def _eval_batch(f: Form, pts: np.ndarray) -> np.ndarray:
    vals = np.zeros(pts.shape[0])
    for alpha, c in f.coeffs.items():
        term = np.full(pts.shape[0], float(c))
        for j, aj in enumerate(alpha):
            if aj:
                term = term * pts[:, j] ** aj
        vals += term
    return vals


def _descend(f: Form, x0: np.ndarray, iters: int = 120) -> tuple[float, np.ndarray]:
    x = x0 / np.linalg.norm(x0)
    val = float(_eval_batch(f, x[None, :])[0])
    step = 0.1
    for _ in range(iters):
        g = _gradient(f, x)
        g_tan = g - (g @ x) * x
        gn = np.linalg.norm(g_tan)
        if gn < 1e-14:
            break
        improved = False
        while step > 1e-14:
            cand = x - step * g_tan
            cand /= np.linalg.norm(cand)
            cval = float(_eval_batch(f, cand[None, :])[0])
            if cval < val - 1e-18:
                x, val = cand, cval
                improved = True
                step *= 1.5
                break
            step *= 0.5
        if not improved:
            break
    return val, x


def _grid_points(nvars: int, m: int) -> tuple[np.ndarray, float | None]:
    """Deterministic near-uniform sphere grid; mesh bound known for nvars <= 3."""
    if nvars == 2:
        ang = np.linspace(0.0, math.pi, m, endpoint=False)
        pts = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        return pts, math.pi / m
    if nvars == 3:
        lats = np.linspace(0.0, math.pi, m)
        rows = []
        for lat in lats:
            ring = max(1, int(round(2 * m * math.sin(lat))) )
            lons = np.linspace(0.0, 2 * math.pi, ring, endpoint=False)
            rows.append(np.stack([
                np.full(ring, math.cos(lat)),
                np.sin(lat) * np.cos(lons),
                np.sin(lat) * np.sin(lons),
            ], axis=1))
        return np.concatenate(rows, axis=0), 2.2 * math.pi / m
    rng = np.random.RandomState(12345)
    pts = rng.randn(m * m, nvars)
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return pts, None


def lipschitz_bound(f: Form) -> float:
    """Crude sup-norm bound for the sphere gradient: sum |c_alpha| * |alpha|."""
    return float(sum(abs(float(c)) * sum(alpha) for alpha, c in f.coeffs.items()))


def psd_sample_test(f: Form, seed: int = 0, starts: int = 12, grid_m: int = 60) -> SampleReport:
    """Best sphere minimum found by descent + grid; refutes when clearly negative.

    Acceptance is never claimed: a positive minimum together with the grid
    mesh and gradient bound is reported as interior evidence only.
    """
    nvars = f.n + 1
    rng = np.random.RandomState(seed)
    best_val, best_x = np.inf, None
    # axis and sign-pattern starts, then random ones
    inits = [np.eye(nvars)[i] for i in range(nvars)]
    inits += [np.ones(nvars) * s for s in (1.0, -1.0)]
    for _ in range(starts):
        inits.append(rng.randn(nvars))
    signs = [np.array(sv) for sv in _sign_patterns(nvars)]
    inits += signs
    for x0 in inits:
        if np.linalg.norm(x0) < 1e-12:
            continue
        val, x = _descend(f, x0.astype(float))
        if val < best_val:
            best_val, best_x = val, x
    grid, mesh = _grid_points(nvars, grid_m)
    gvals = _eval_batch(f, grid)
    gi = int(np.argmin(gvals))
    if gvals[gi] < best_val:
        val, x = _descend(f, grid[gi])
        if val < best_val:
            best_val, best_x = val, x
    scale = max(1.0, max(abs(float(c)) for c in f.coeffs.values()) if f.coeffs else 1.0)
    refuted = best_val < -1e-9 * scale
    evidence = {
        "grid_min": float(np.min(gvals)),
        "grid_points": int(grid.shape[0]),
        "grid_mesh": mesh,
        "gradient_bound": lipschitz_bound(f),
    }
    if mesh is not None:
        evidence["grid_lower_bound"] = float(np.min(gvals)) - lipschitz_bound(f) * mesh
    return SampleReport(min_value=float(best_val), argmin=tuple(float(v) for v in best_x),
                        refuted=bool(refuted), evidence=evidence)


def _sign_patterns(nvars: int) -> list[tuple[float, ...]]:
    out = []
    for mask in range(2 ** (nvars - 1)):
        vec = [1.0]
        for i in range(nvars - 1):
            vec.append(1.0 if (mask >> i) & 1 == 0 else -1.0)
        out.append(tuple(vec))
    return out


def negative_point(f: Form, seed: int = 0, starts: int = 12) -> tuple[Fraction, ...] | None:
    """An exact rational point with f(x) < 0, found by descent then snapping."""
    report = psd_sample_test(f, seed=seed, starts=starts)
    if report.min_value >= 0:
        return None
    x = report.argmin
    for cap in (16, 64, 256, 2048, 10**5, 10**8):
        cand = tuple(Fraction(v).limit_denominator(cap) for v in x)
        if any(v != 0 for v in cand) and f.evaluate(cand) < 0:
            return cand
    return None
