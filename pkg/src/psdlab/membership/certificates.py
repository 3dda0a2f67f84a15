"""Certificate objects and the independent exact checker.

Three certificate kinds travel through the toolkit:

* SosCertificate — a rational PSD Gram matrix plus explicit squares summing
  to the form; proof of cone membership at level 0 (margin > 0 upgrades it to
  an interior witness).
* DualPointCertificate — weighted real points of the level-i variety whose
  moment matrix annihilates the Gram kernel and pairs negatively with the
  form; proof of non-membership at level i.
* LevelCertificate — an exact polynomial identity
  q_A * (sum Z_l^2)^r = sigma + sum_j p_j * q_j with sigma SOS; proof of
  membership at level i, because every q_j vanishes on the level-i variety.

verify_certificate re-derives every invariant in exact rational arithmetic
from the serialized data alone; nothing the producer cached is trusted.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Optional

from ..forms import Form
from ..gram import (
    FiltrationDescriptor,
    SymMat,
    canonical_gram,
    filtration,
    gram_apply,
    kernel_basis_cached,
)
from ..monomials import MonomialOrder, monomial_eval, ordered_basis
from ..psdcore import IndefiniteWitness, ldlt
from ..rational import format_rational, parse_rational


@dataclass(frozen=True)
class SosCertificate:
    n: int
    deg: int
    gram: SymMat
    squares: tuple[Form, ...]
    margin: Fraction

    kind = "sos"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "deg": self.deg,
            "gram": self.gram.to_json(),
            "squares": [g.to_json() for g in self.squares],
            "margin": format_rational(self.margin),
        }

    @classmethod
    def from_json(cls, data: dict) -> "SosCertificate":
        return cls(
            n=int(data["n"]),
            deg=int(data["deg"]),
            gram=SymMat.from_json(data["gram"]),
            squares=tuple(Form.from_json(g) for g in data["squares"]),
            margin=parse_rational(data["margin"]),
        )


@dataclass(frozen=True)
class DualPoint:
    z: tuple[Fraction, ...]
    x: Optional[tuple[Fraction, ...]]  # parametrization witness; None only at level 0

    def to_json(self) -> dict:
        return {
            "z": [format_rational(v) for v in self.z],
            "x": None if self.x is None else [format_rational(v) for v in self.x],
        }

    @classmethod
    def from_json(cls, data: dict) -> "DualPoint":
        x = data.get("x")
        return cls(
            z=tuple(parse_rational(v) for v in data["z"]),
            x=None if x is None else tuple(parse_rational(v) for v in x),
        )


@dataclass(frozen=True)
class DualPointCertificate:
    n: int
    deg: int
    order: MonomialOrder
    level: int
    points: tuple[DualPoint, ...]
    weights: tuple[Fraction, ...]
    gap: Fraction

    kind = "dual_points"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "deg": self.deg,
            "order": self.order.value,
            "level": self.level,
            "points": [p.to_json() for p in self.points],
            "weights": [format_rational(w) for w in self.weights],
            "gap": format_rational(self.gap),
        }

    @classmethod
    def from_json(cls, data: dict) -> "DualPointCertificate":
        return cls(
            n=int(data["n"]),
            deg=int(data["deg"]),
            order=MonomialOrder.from_name(data["order"]),
            level=int(data["level"]),
            points=tuple(DualPoint.from_json(p) for p in data["points"]),
            weights=tuple(parse_rational(w) for w in data["weights"]),
            gap=parse_rational(data["gap"]),
        )


@dataclass(frozen=True)
class LevelCertificate:
    n: int
    deg: int
    order: MonomialOrder
    level: int
    lift: int
    gram: SymMat                       # element of the Gram fiber of f
    multipliers: tuple[Form, ...]      # degree-2*lift forms in k+1 variables
    sos_part: SymMat                   # PSD Gram over the degree-(lift+1) Z-monomials

    kind = "level"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "deg": self.deg,
            "order": self.order.value,
            "level": self.level,
            "lift": self.lift,
            "gram": self.gram.to_json(),
            "multipliers": [p.to_json() for p in self.multipliers],
            "sos_part": self.sos_part.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "LevelCertificate":
        return cls(
            n=int(data["n"]),
            deg=int(data["deg"]),
            order=MonomialOrder.from_name(data["order"]),
            level=int(data["level"]),
            lift=int(data["lift"]),
            gram=SymMat.from_json(data["gram"]),
            multipliers=tuple(Form.from_json(p) for p in data["multipliers"]),
            sos_part=SymMat.from_json(data["sos_part"]),
        )


Certificate = SosCertificate | DualPointCertificate | LevelCertificate


def certificate_from_json(data: dict) -> Certificate:
    kind = data.get("kind")
    if kind == "sos":
        return SosCertificate.from_json(data)
    if kind == "dual_points":
        return DualPointCertificate.from_json(data)
    if kind == "level":
        return LevelCertificate.from_json(data)
    raise ValueError(f"unknown certificate kind {kind!r}")


@dataclass(frozen=True)
class Verification:
    valid: bool
    reason: Optional[str] = None
    structural: bool = False

    def __bool__(self) -> bool:
        return self.valid


def _structural(reason: str) -> Verification:
    return Verification(False, reason, structural=True)


def _invalid(reason: str) -> Verification:
    return Verification(False, reason)

VALID = Verification(True)


def quadratic_form_of(a: SymMat, z: tuple[Fraction, ...]) -> Fraction:
    """z^T A z, exact, using only the sparse entries of A."""
    total = Fraction(0)
    for s, t, v in a.nonzero_items():
        total += v * z[s] * z[t] * (1 if s == t else 2)
    return total


def symmat_as_quadratic(a: SymMat) -> Form:
    """The quadratic form q_A as a Form in dim(A) variables."""
    coeffs = {}
    dim = a.dim
    for s, t, v in a.nonzero_items():
        key = tuple((1 if i == s else 0) + (1 if i == t else 0) for i in range(dim))
        coeffs[key] = v if s == t else 2 * v
    return Form(dim - 1, 2, coeffs)


def sum_of_squares_quadric(nvars: int) -> Form:
    """sum_l Z_l^2 as a Form in nvars variables."""
    coeffs = {}
    for i in range(nvars):
        key = tuple(2 if j == i else 0 for j in range(nvars))
        coeffs[key] = Fraction(1)
    return Form(nvars - 1, 2, coeffs)


def form_power(f: Form, r: int) -> Form:
    out = Form(f.n, 0, {tuple(0 for _ in range(f.n + 1)): Fraction(1)})
    for _ in range(r):
        out = out * f
    return out


def multinomial(gamma: tuple[int, ...]) -> int:
    total = sum(gamma)
    out = factorial(total)
    for g in gamma:
        out //= factorial(g)
    return out


def level_quadrics(descriptor: FiltrationDescriptor, level: int) -> list:
    quads = descriptor.present_quadrics()
    if not 0 <= level <= len(quads):
        raise ValueError(f"level {level} out of range 0..{len(quads)}")
    return quads[:level]


def verify_certificate(cert: Certificate, f: Form) -> Verification:
    """Exact, independent re-check of every invariant of the certificate."""
    if isinstance(cert, SosCertificate):
        return _verify_sos(cert, f)
    if isinstance(cert, DualPointCertificate):
        return _verify_dual(cert, f)
    if isinstance(cert, LevelCertificate):
        return _verify_level(cert, f)
    raise TypeError(f"not a certificate: {type(cert).__name__}")


def _verify_sos(cert: SosCertificate, f: Form) -> Verification:
    if (cert.n, cert.deg) != (f.n, f.deg):
        return _structural(f"certificate is for (n={cert.n}, deg={cert.deg}), form is (n={f.n}, deg={f.deg})")
    if cert.deg % 2 != 0:
        return _structural("odd degree")
    d = cert.deg // 2
    basis = ordered_basis(cert.n, d)
    if cert.gram.dim != basis.k + 1:
        return _structural(f"gram dimension {cert.gram.dim}, expected {basis.k + 1}")
    if gram_apply(cert.gram, basis) != f:
        return _invalid("gram matrix does not represent the form")
    if cert.margin < 0:
        return _invalid("negative margin")
    shifted = cert.gram - SymMat.identity(cert.gram.dim).scale(cert.margin) if cert.margin > 0 else cert.gram
    if isinstance(ldlt(shifted, exact=True), IndefiniteWitness):
        return _invalid("gram matrix minus margin*I is not PSD")
    total = None
    for g in cert.squares:
        if (g.n, g.deg) != (cert.n, d):
            return _structural(f"square has shape (n={g.n}, deg={g.deg}), expected (n={cert.n}, deg={d})")
        sq = g * g
        total = sq if total is None else total + sq
    if total is None:
        total = Form(cert.n, cert.deg, {})
    if total != f:
        return _invalid("squares do not sum to the form")
    return VALID


def _verify_dual(cert: DualPointCertificate, f: Form) -> Verification:
    if (cert.n, cert.deg) != (f.n, f.deg):
        return _structural(f"certificate is for (n={cert.n}, deg={cert.deg}), form is (n={f.n}, deg={f.deg})")
    if cert.deg % 2 != 0:
        return _structural("odd degree")
    d = cert.deg // 2
    desc = filtration(cert.n, d, cert.order)
    if not 0 <= cert.level <= desc.varieties:
        return _structural(f"level {cert.level} out of range 0..{desc.varieties}")
    basis = ordered_basis(cert.n, d, cert.order)
    kdim = basis.k + 1
    if len(cert.points) != len(cert.weights) or not cert.points:
        return _structural("points/weights length mismatch or empty")
    if any(w <= 0 for w in cert.weights):
        return _invalid("weights must be strictly positive")
    if cert.gap >= 0:
        return _invalid("gap must be negative")
    fixed = desc.fixed_coordinates(cert.level)
    for p in cert.points:
        if len(p.z) != kdim:
            return _structural(f"point has {len(p.z)} coordinates, expected {kdim}")
        if p.x is None:
            if cert.level != 0:
                return _invalid("points above level 0 need a parametrization witness")
            continue
        if len(p.x) != cert.n + 1:
            return _structural("witness dimension mismatch")
        for l in range(fixed):
            if p.z[l] != monomial_eval(basis.entries[l], p.x):
                return _invalid(f"point coordinate {l} does not match its witness monomial")
    a_f = canonical_gram(f, basis)
    pairing = Fraction(0)
    for w, p in zip(cert.weights, cert.points):
        pairing += w * quadratic_form_of(a_f, p.z)
    if pairing != cert.gap:
        return _invalid("pairing with the form's Gram fiber does not equal the stated gap")
    for b in kernel_basis_cached(cert.n, d, cert.order):
        total = Fraction(0)
        for w, p in zip(cert.weights, cert.points):
            total += w * quadratic_form_of(b, p.z)
        if total != 0:
            return _invalid("moment matrix does not annihilate the Gram kernel")
    return VALID


def _verify_level(cert: LevelCertificate, f: Form) -> Verification:
    if (cert.n, cert.deg) != (f.n, f.deg):
        return _structural(f"certificate is for (n={cert.n}, deg={cert.deg}), form is (n={f.n}, deg={f.deg})")
    if cert.deg % 2 != 0:
        return _structural("odd degree")
    if cert.lift < 0:
        return _structural("negative lift")
    d = cert.deg // 2
    desc = filtration(cert.n, d, cert.order)
    if not 0 <= cert.level <= desc.varieties:
        return _structural(f"level {cert.level} out of range 0..{desc.varieties}")
    basis = ordered_basis(cert.n, d, cert.order)
    kdim = basis.k + 1
    if cert.gram.dim != kdim:
        return _structural(f"gram dimension {cert.gram.dim}, expected {kdim}")
    if gram_apply(cert.gram, basis) != f:
        return _invalid("gram matrix does not represent the form")
    quads = level_quadrics(desc, cert.level)
    if len(cert.multipliers) != len(quads):
        return _structural(f"{len(cert.multipliers)} multipliers for {len(quads)} quadrics")
    zbasis = ordered_basis(kdim - 1, cert.lift + 1) if cert.lift >= 0 else None
    if cert.sos_part.dim != zbasis.k + 1:
        return _structural(f"sos part dimension {cert.sos_part.dim}, expected {zbasis.k + 1}")
    if isinstance(ldlt(cert.sos_part, exact=True), IndefiniteWitness):
        return _invalid("sos part is not PSD")
    q_a = symmat_as_quadratic(cert.gram)
    lhs = q_a * form_power(sum_of_squares_quadric(kdim), cert.lift)
    for p, q in zip(cert.multipliers, quads):
        if (p.n, p.deg) != (kdim - 1, 2 * cert.lift):
            return _structural("multiplier has wrong shape")
        lhs = lhs - p * symmat_as_quadratic(q.matrix)
    rhs = gram_apply(cert.sos_part, zbasis)
    if lhs != rhs:
        return _invalid("polynomial identity fails")
    return VALID
