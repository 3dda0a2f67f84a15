"""Certificate-producing membership, refutation, interior and boundary tests.

Every positive answer carries an exact certificate that verify_certificate
re-checks before it is returned; every negative answer carries a dual-point
certificate.  Anything the numerics cannot pin down is Unknown — the float
engine proposes, the rational arithmetic disposes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from ..exactla import feasible_point
from ..forms import Form, basis_sos
from ..gram import (
    FiltrationDescriptor,
    SymMat,
    canonical_gram,
    filtration,
    kernel_basis_cached,
)
from ..monomials import MonomialOrder, degree_indices, ordered_basis
from ..psdcore import IndefiniteWitness, LdltFactorization, ldlt
from ..rational import DENOMINATOR_LADDER, square_weights
from .certificates import (
    Certificate,
    DualPoint,
    DualPointCertificate,
    LevelCertificate,
    SosCertificate,
    form_power,
    level_quadrics,
    multinomial,
    quadratic_form_of,
    sum_of_squares_quadric,
    symmat_as_quadratic,
    verify_certificate,
)
from .engine import (
    MAX_ITER,
    RESIDUAL_TOL,
    SHIFT_LADDER,
    AffineLift,
    certify_psd_in_fiber,
    dykstra_gram,
    dykstra_lift,
    exact_fiber_repair,
    form_to_vec,
    gram_layout,
)
from .sampling import hi_sample, negative_point


@dataclass
class Options:
    seed: int = 0
    max_iter: int = MAX_ITER
    residual_tol: float = RESIDUAL_TOL
    shift_ladder: tuple = SHIFT_LADDER
    pool: int = 260
    lp_rounds: int = 2
    sample_starts: int = 12
    skip_sos_fast_path: bool = False   # force the lifted engine (testing hook)


@dataclass
class MembershipResult:
    status: str                        # "accepted" | "refuted" | "unknown"
    certificate: Optional[Certificate] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def accepted(self) -> bool:
        return self.status == "accepted"

    @property
    def refuted(self) -> bool:
        return self.status == "refuted"


class CertificateConstructionError(RuntimeError):
    """An emitted certificate failed its own exact verification (a bug)."""


def _checked(cert: Certificate, f: Form) -> Certificate:
    verdict = verify_certificate(cert, f)
    if not verdict:
        raise CertificateConstructionError(f"freshly built certificate failed: {verdict.reason}")
    return cert


def squares_from_gram(gram: SymMat, f: Form) -> tuple[Form, ...]:
    """Exact squares summing to f, read off a rational PSD Gram matrix.

    The rational LDL^T gives f = sum d_j g_j^2; each positive weight d_j is
    split into at most four rational squares, so the result is an honest
    unweighted sum of squares over the rationals.
    """
    basis = ordered_basis(f.n, f.deg // 2)
    res = ldlt(gram, exact=True)
    if isinstance(res, IndefiniteWitness):
        raise CertificateConstructionError("gram matrix is not PSD")
    squares = []
    size = len(res.perm)
    for j, dj in enumerate(res.diag):
        if dj == 0:
            continue
        coeffs = {}
        for i in range(size):
            lij = res.lower[i][j]
            if lij:
                alpha = basis.entries[res.perm[i]]
                coeffs[alpha] = coeffs.get(alpha, Fraction(0)) + lij
        g = Form(f.n, basis.d, coeffs)
        for a in square_weights(dj):
            squares.append(g.scale(a))
    return tuple(squares)


def _verified_margin(gram: SymMat, hint: float | None = None) -> Fraction:
    """Largest exactly verified mu with gram - mu*I PSD, from a float hint."""
    if hint is None:
        lam = float(np.linalg.eigvalsh(gram.to_numpy())[0])
    else:
        lam = hint
    if lam <= 1e-12:
        return Fraction(0)
    ident = SymMat.identity(gram.dim)
    candidates = {Fraction(lam * shrink).limit_denominator(cap)
                  for shrink in (1.0, 0.97, 0.9, 0.75, 0.5)
                  for cap in (1, 2, 4, 16, 256, 4096, 10**6)}
    for mu in sorted(candidates, reverse=True):
        if mu <= 0:
            continue
        if not isinstance(ldlt(gram - ident.scale(mu), exact=True), IndefiniteWitness):
            return mu
    return Fraction(0)


def _sos_certificate(gram: SymMat, f: Form, margin: Fraction | None = None) -> SosCertificate:
    if margin is None:
        margin = _verified_margin(gram)
    cert = SosCertificate(n=f.n, deg=f.deg, gram=gram, squares=squares_from_gram(gram, f), margin=margin)
    return _checked(cert, f)


def sos_test(f: Form, options: Options | None = None) -> MembershipResult:
    """Accept with an exact SOS certificate, refute with a dual certificate,
    or report Unknown with engine diagnostics.

    The canonical Gram point is tried exactly first; otherwise a shifted
    alternating-projection sweep searches the fiber, and the limit is snapped
    to rationals and re-verified exactly.  Nothing unverified is emitted.
    """
    opts = options or Options()
    if f.deg % 2 != 0:
        raise ValueError("sos test needs an even-degree form")
    if not f:
        return MembershipResult("accepted", _sos_certificate(SymMat.zeros(ordered_basis(f.n, f.deg // 2).k + 1), f))
    basis = ordered_basis(f.n, f.deg // 2)
    a_f = canonical_gram(f, basis)
    if not isinstance(ldlt(a_f, exact=True), IndefiniteWitness):
        return MembershipResult("accepted", _sos_certificate(a_f, f), {"path": "exact-start"})
    scale = max(float(a_f.inner(SymMat.identity(a_f.dim))) / a_f.dim, 1e-6)
    diagnostics = {"path": "engine", "runs": []}
    for mult in opts.shift_ladder:
        shift = mult * scale
        run = dykstra_gram(f, shift, max_iter=opts.max_iter, tol=opts.residual_tol)
        diagnostics["runs"].append({"shift": shift, "residual": run.residual,
                                    "iterations": run.iterations, "converged": run.converged})
        if not run.converged and run.residual > 1e-5:
            continue
        # Near-converged iterates are worth snapping too: certification is
        # exact either way, so a lucky rationalization costs nothing.
        gram = certify_psd_in_fiber(run.matrix, f)
        if gram is not None:
            lam = float(np.linalg.eigvalsh(gram.to_numpy())[0])
            return MembershipResult("accepted", _sos_certificate(gram, f, _verified_margin(gram, lam)), diagnostics)
    refutation = ci_refute(f, 0, options=opts)
    if refutation is not None:
        return MembershipResult("refuted", refutation, diagnostics)
    return MembershipResult("unknown", None, diagnostics)


def interior_sigma_test(f: Form, margin: Fraction, options: Options | None = None) -> MembershipResult:
    """Feasibility for the margin-shifted cone {A in fiber : A >= margin*I}.

    A witness certifies interior membership with the stated margin, exactly.
    The two interior descriptions (positive-definite Gram vs non-singular PSD
    Gram) are both evaluated on the witness and must agree.
    """
    opts = options or Options()
    margin = Fraction(margin)
    if margin <= 0:
        raise ValueError("margin must be positive")
    if f.deg % 2 != 0:
        raise ValueError("interior test needs an even-degree form")
    if not f:
        return MembershipResult("unknown", None, {"reason": "zero form has no interior witness"})
    ident_shift = float(margin)
    run = dykstra_gram(f, ident_shift, max_iter=opts.max_iter, tol=opts.residual_tol)
    diagnostics = {"residual": run.residual, "iterations": run.iterations, "converged": run.converged}
    if not run.converged:
        return MembershipResult("unknown", None, diagnostics)
    basis = ordered_basis(f.n, f.deg // 2)
    ident = SymMat.identity(basis.k + 1)
    for cap in DENOMINATOR_LADDER:
        a_q = exact_fiber_repair(SymMat.from_numpy(run.matrix, cap), f)
        shifted = a_q - ident.scale(margin)
        if isinstance(ldlt(shifted, exact=True), IndefiniteWitness):
            continue
        # Equivalent interior description: PSD and non-singular.
        fact = ldlt(a_q, exact=True)
        nonsingular = isinstance(fact, LdltFactorization) and all(dj > 0 for dj in fact.diag)
        if not nonsingular:
            raise CertificateConstructionError("margin witness is PD but LDL^T found a zero pivot")
        cert = _sos_certificate(a_q, f, margin)
        diagnostics["nonsingular_psd_agrees"] = True
        return MembershipResult("accepted", cert, diagnostics)
    return MembershipResult("unknown", None, diagnostics)


def _single_point_certificate(f: Form, x: tuple[Fraction, ...], level: int,
                              order: MonomialOrder) -> DualPointCertificate:
    """The evaluation functional at a rational point with f(x) < 0.

    Its moment matrix is the rank-one outer square of the monomial vector, so
    it annihilates the kernel identically and works at every level.
    """
    basis = ordered_basis(f.n, f.deg // 2, order)
    from ..monomials import monomial_vector

    z = tuple(Fraction(v) for v in monomial_vector(basis, x))
    value = f.evaluate(x)
    if value >= 0:
        raise ValueError("point does not witness negativity")
    weight = -1 / value
    return DualPointCertificate(n=f.n, deg=f.deg, order=order, level=level,
                                points=(DualPoint(z=z, x=tuple(Fraction(v) for v in x)),),
                                weights=(Fraction(weight),), gap=Fraction(-1))


def _integerize(z: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    from math import lcm

    den = lcm(*[v.denominator for v in z])
    return tuple(v * den for v in z)


def _separator_points(f: Form, order: MonomialOrder, iters: int = 4000) -> list[DualPoint]:
    """Eigen-directions of the gap vector of the stalled SOS projection.

    When the Gram fiber misses the PSD cone, plain alternating projections
    converge to the minimal-distance pair (a*, k*); the gap M = k* - a* is
    PSD, annihilates the kernel and pairs negatively with the fiber, i.e. it
    is a separating moment matrix.  Its rationalized eigenvectors aim the
    dual LP at the separating face.
    """
    from .engine import fiber_project_np, form_to_vec, gram_layout, psd_project_np

    d = f.deg // 2
    layout = gram_layout(f.n, d, order)
    fvec = form_to_vec(f, layout)
    x = canonical_gram(f, ordered_basis(f.n, d, order)).to_numpy()
    for _ in range(iters):
        y = psd_project_np(x)
        x_new = fiber_project_np(y, fvec, layout)
        if float(np.linalg.norm(x_new - x, "fro")) < 1e-14:
            x = x_new
            break
        x = x_new
    gap = psd_project_np(x) - x
    if float(np.linalg.norm(gap, "fro")) < 1e-10:
        return []
    lam, vec = np.linalg.eigh(gap)
    points = []
    for i in range(len(lam)):
        if lam[i] <= 1e-10 * max(lam[-1], 1e-30):
            continue
        for cap in (32, 256, 4096):
            z = tuple(Fraction(float(v)).limit_denominator(cap) for v in vec[:, i])
            if any(v != 0 for v in z):
                points.append(DualPoint(z=_integerize(z), x=None))
    return points


def ci_refute(f: Form, level: int, order: MonomialOrder = MonomialOrder.LEX_DESC,
              options: Options | None = None,
              descriptor: FiltrationDescriptor | None = None) -> Optional[DualPointCertificate]:
    """Separating dual-point certificate for non-membership at a level, or None.

    Fast path: a rational point with f(x) < 0 refutes every level at once.
    Otherwise a pool of level-admissible points (enriched, at level 0, with
    the eigen-directions of the projection gap vector) feeds a phase-one LP;
    the float solution only selects a support, the weights are re-solved
    exactly, and the certificate is exact-verified before being returned.
    None means the pool admitted no certificate, never that f is a member.
    """
    opts = options or Options()
    if f.deg % 2 != 0:
        raise ValueError("refutation needs an even-degree form")
    if not f:
        return None
    d = f.deg // 2
    desc = descriptor or filtration(f.n, d, order)
    if not 0 <= level <= desc.varieties:
        raise ValueError(f"level {level} out of range 0..{desc.varieties}")
    x_neg = negative_point(f, seed=opts.seed, starts=opts.sample_starts)
    if x_neg is not None:
        return _checked(_single_point_certificate(f, x_neg, level, order), f)

    basis = ordered_basis(f.n, d, order)
    kernel = kernel_basis_cached(f.n, d, order)
    a_f = canonical_gram(f, basis)
    guided = _separator_points(f, order) if level == 0 else []
    if level == 0 and not guided:
        return None  # the fiber meets the PSD cone numerically: no separator
    pool_size = opts.pool
    for round_idx in range(opts.lp_rounds):
        points = guided + hi_sample(desc, level, opts.seed + 1000 * round_idx, pool_size)
        obj = [quadratic_form_of(a_f, p.z) for p in points]
        rows = [[quadratic_form_of(b, p.z) for p in points] for b in kernel]
        cert = _refute_lp(f, points, obj, rows, level, order)
        if cert is not None:
            return cert
        pool_size *= 2
    return None


def _refute_lp(f: Form, points, obj, rows, level, order) -> Optional[DualPointCertificate]:
    npts = len(points)
    # Columns are conic generators: scale is arbitrary, so normalize for the
    # float solver; the exact phase uses the raw rational data.
    colscale = 1.0 / np.maximum(np.array([sum(float(v) ** 2 for v in p.z) for p in points]), 1e-12)
    obj_np = np.array([float(v) for v in obj]) * colscale
    rows_np = (np.array([[float(v) for v in row] for row in rows], dtype=float).reshape(len(rows), npts)
               * colscale[None, :]) if rows else np.zeros((0, npts))
    a_eq = np.vstack([rows_np, np.ones((1, npts))])
    b_eq = np.zeros(a_eq.shape[0])
    b_eq[-1] = 1.0
    res = linprog(c=obj_np, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if not res.success or res.fun > -1e-7:
        return None
    order_by_weight = np.argsort(-res.x)
    support = [int(i) for i in order_by_weight if res.x[i] > 1e-10]
    extras = [int(i) for i in order_by_weight if res.x[i] <= 1e-10][:60]
    for cols in (support + extras, list(range(npts))):
        sys_rows = [[rows[l][c] for c in cols] for l in range(len(rows))]
        sys_rows.append([obj[c] for c in cols])
        rhs = [Fraction(0)] * len(rows) + [Fraction(-1)]
        sol = feasible_point(sys_rows, rhs)
        if sol is None:
            continue
        pts, weights = [], []
        for c, w in zip(cols, sol):
            if w > 0:
                pts.append(points[c])
                weights.append(w)
        cert = DualPointCertificate(n=f.n, deg=f.deg, order=order, level=level,
                                    points=tuple(pts), weights=tuple(weights), gap=Fraction(-1))
        return _checked(cert, f)
    return None


def _tensor_sos_part(a: SymMat, lift: int) -> SymMat:
    """Exact SOS Gram of q_A * (sum Z^2)^lift over degree-(lift+1) monomials.

    Sum of congruences of A by the multiplication-by-Z^gamma embeddings, so it
    is PSD whenever A is, and represents the product form exactly.
    """
    kp1 = a.dim
    zbasis = ordered_basis(kp1 - 1, lift + 1)
    pos = zbasis._lookup()
    entries: dict[tuple[int, int], Fraction] = {}
    for gamma in degree_indices(kp1, lift):
        cg = multinomial(gamma)
        for s, t, v in a.nonzero_items():
            u = pos[tuple(g + (1 if i == s else 0) for i, g in enumerate(gamma))]
            w = pos[tuple(g + (1 if i == t else 0) for i, g in enumerate(gamma))]
            key = (u, w) if u <= w else (w, u)
            entries[key] = entries.get(key, Fraction(0)) + cg * v
    return SymMat.from_entries(zbasis.k + 1, entries)


def ci_inner_certify(f: Form, level: int, lift: int = 1,
                     order: MonomialOrder = MonomialOrder.LEX_DESC,
                     options: Options | None = None) -> MembershipResult:
    """Degree-lifted membership certificate for the level-i cone.

    With lift r the engine searches for a fiber matrix A, quadric multipliers
    p_j and an SOS part sigma with q_A * (sum Z^2)^r = sigma + sum p_j q_j,
    exactly.  At r = 0 every multiplier combination stays inside the Gram
    kernel, so the relaxation collapses to the plain SOS test; that collapse
    is intentional and documented.  Never claims non-membership.
    """
    opts = options or Options()
    if f.deg % 2 != 0:
        raise ValueError("membership needs an even-degree form")
    if lift < 0:
        raise ValueError("lift must be >= 0")
    d = f.deg // 2
    desc = filtration(f.n, d, order)
    quads = level_quadrics(desc, level)
    if not opts.skip_sos_fast_path:
        sos = sos_test(f, opts)
        if sos.accepted:
            a = sos.certificate.gram
            cert = LevelCertificate(n=f.n, deg=f.deg, order=order, level=level, lift=lift,
                                    gram=a, multipliers=tuple(Form(a.dim - 1, 2 * lift, {})
                                                              for _ in quads),
                                    sos_part=_tensor_sos_part(a, lift))
            return MembershipResult("accepted", _checked(cert, f), {"path": "sos-collapse"})
        if lift == 0 or level == 0:
            return MembershipResult(sos.status, sos.certificate,
                                    {"path": "r0-collapse", "note": "lift 0 coincides with the SOS test"})
    elif lift == 0 or level == 0:
        raise ValueError("the engine path needs lift >= 1 and level >= 1")

    basis = ordered_basis(f.n, d, order)
    kp1 = basis.k + 1
    from math import comb

    if comb(kp1 + lift, lift + 1) > 600:
        raise ValueError(f"lift {lift} at k = {kp1 - 1} is beyond desk scale "
                         f"({comb(kp1 + lift, lift + 1)} lifted monomials)")
    kernel = kernel_basis_cached(f.n, d, order)
    layout_z = gram_layout(kp1 - 1, lift + 1)
    zbasis = layout_z["basis"]
    s_pow = form_power(sum_of_squares_quadric(kp1), lift)
    a_f = canonical_gram(f, basis)
    b_form = symmat_as_quadratic(a_f) * s_pow
    b_vec = form_to_vec(b_form, layout_z)
    columns = []
    col_meta = []
    for idx, bmat in enumerate(kernel):
        columns.append(form_to_vec(symmat_as_quadratic(bmat) * s_pow, layout_z))
        col_meta.append(("kernel", idx))
    mult_monomials = degree_indices(kp1, 2 * lift)
    for j, quad in enumerate(quads):
        qform = symmat_as_quadratic(quad.matrix)
        for gamma in mult_monomials:
            columns.append(form_to_vec(Form(kp1 - 1, 2 * lift, {tuple(gamma): Fraction(1)}) * qform, layout_z))
            col_meta.append(("mult", j, tuple(gamma)))
    v = np.array(columns, dtype=float).T if columns else np.zeros((len(layout_z["betas"]), 0))
    lift_set = AffineLift(layout=layout_z, b=b_vec, v=v)
    start = canonical_gram(b_form, zbasis).to_numpy()
    scale = max(float(np.trace(start)) / start.shape[0], 1e-6)
    diagnostics = {"path": "lifted-engine", "runs": []}
    for mult in opts.shift_ladder:
        run = dykstra_lift(lift_set, start, mult * scale, max_iter=opts.max_iter, tol=opts.residual_tol)
        diagnostics["runs"].append({"shift": mult * scale, "residual": run.residual,
                                    "iterations": run.iterations, "converged": run.converged})
        if not run.converged:
            continue
        theta = [Fraction(float(v)).limit_denominator(10**9) for v in run.params]
        a_q = a_f
        for (meta, th) in zip(col_meta, theta):
            if meta[0] == "kernel" and th:
                a_q = a_q + kernel[meta[1]].scale(th)
        multipliers = []
        for j in range(len(quads)):
            coeffs = {}
            for (meta, th) in zip(col_meta, theta):
                if meta[0] == "mult" and meta[1] == j and th:
                    coeffs[meta[2]] = -th
            multipliers.append(Form(kp1 - 1, 2 * lift, coeffs))
        target = symmat_as_quadratic(a_q) * s_pow
        for p, quad in zip(multipliers, quads):
            target = target - p * symmat_as_quadratic(quad.matrix)
        for cap in DENOMINATOR_LADDER[2:]:
            s_q = exact_fiber_repair(SymMat.from_numpy(run.matrix, cap), target)
            if not isinstance(ldlt(s_q, exact=True), IndefiniteWitness):
                cert = LevelCertificate(n=f.n, deg=f.deg, order=order, level=level, lift=lift,
                                        gram=a_q, multipliers=tuple(multipliers), sos_part=s_q)
                return MembershipResult("accepted", _checked(cert, f), diagnostics)
    return MembershipResult("unknown", None, diagnostics)


@dataclass
class ProbeReport:
    classification: str                  # interior | exterior | boundary-suspect | unknown
    t_out: Fraction                      # largest t with a verified refutation
    t_in: Optional[Fraction]             # smallest t with a verified interior certificate
    bracket_width: Optional[Fraction]
    evidence: dict = field(default_factory=dict)


def _interior_at(f: Form, level: int, lift: int, order, opts) -> tuple[bool, Optional[Certificate]]:
    if level == 0:
        res = sos_test(f, opts)
        if res.accepted and res.certificate.margin > 0:
            return True, res.certificate
        return False, res.certificate if res.accepted else None
    res = ci_inner_certify(f, level, lift, order, opts)
    if not res.accepted:
        return False, None
    lam = float(np.linalg.eigvalsh(res.certificate.sos_part.to_numpy())[0])
    if lam <= 1e-10:
        return False, res.certificate
    shifted = res.certificate.sos_part - SymMat.identity(res.certificate.sos_part.dim).scale(
        Fraction(lam / 2).limit_denominator(10**6))
    if isinstance(ldlt(shifted, exact=True), IndefiniteWitness):
        return False, res.certificate
    return True, res.certificate


def boundary_probe(f: Form, level: int = 0, reference: Form | None = None,
                   lift: int = 1, order: MonomialOrder = MonomialOrder.LEX_DESC,
                   options: Options | None = None, t_tol: Fraction = Fraction(1, 1000)) -> ProbeReport:
    """Bisect the segment toward an interior reference form.

    Membership is monotone along the segment, so refutations bound t from
    below and interior certificates from above; the probe reports the exact
    bracket with certificates at both endpoints and classifies f as interior
    (t_in = 0), exterior (refuted at t = 0), or boundary-suspect (no verdict
    at 0, interior for every probed t below the tolerance).
    """
    opts = options or Options()
    if f.deg % 2 != 0:
        raise ValueError("probe needs an even-degree form")
    g = reference if reference is not None else basis_sos(f.n, f.deg // 2)

    def mix(t: Fraction) -> Form:
        return f.scale(1 - t) + g.scale(t)

    evidence: dict = {"points": []}
    refutation = ci_refute(f, level, order, opts)
    if refutation is not None:
        evidence["refutation_at_0"] = refutation.to_json()
        return ProbeReport("exterior", Fraction(0), None, None, evidence)
    inside, cert0 = _interior_at(f, level, lift, order, opts)
    if inside:
        evidence["interior_at_0"] = cert0.to_json()
        return ProbeReport("interior", Fraction(0), Fraction(0), Fraction(0), evidence)
    if cert0 is not None:
        evidence["member_at_0"] = cert0.to_json()

    lo, hi = Fraction(0), Fraction(1)
    inside_hi, cert_hi = _interior_at(mix(hi), level, lift, order, opts)
    if not inside_hi:
        return ProbeReport("unknown", Fraction(0), None, None,
                           {"reason": "reference mix at t=1 did not certify interior"})
    evidence["interior_at_t_in"] = cert_hi.to_json()
    while hi - lo > t_tol:
        mid = (lo + hi) / 2
        ref_mid = ci_refute(mix(mid), level, order, opts)
        if ref_mid is not None:
            lo = mid
            evidence["refutation_at_t_out"] = ref_mid.to_json()
            continue
        inside_mid, cert_mid = _interior_at(mix(mid), level, lift, order, opts)
        if inside_mid:
            hi = mid
            evidence["interior_at_t_in"] = cert_mid.to_json()
        else:
            evidence["points"].append({"t": str(mid), "status": "unknown"})
            break
    width = hi - lo
    if lo == 0 and hi <= t_tol:
        classification = "boundary-suspect" if cert0 is not None or width <= t_tol else "unknown"
    elif lo > 0:
        classification = "exterior"
    else:
        classification = "unknown"
    return ProbeReport(classification, lo, hi, width, evidence)
