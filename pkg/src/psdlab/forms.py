"""Homogeneous polynomials with exact rational coefficients.

A Form is an immutable coefficient map {multi-index: Fraction}.  Evaluation is
exact at rational points and binary64 at float points.  The module also holds
the named test fixtures and the classification of the equality cases where
every PSD form is a sum of squares.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .monomials import MonomialOrder, MultiIndex, monomial_eval, ordered_basis
from .rational import format_rational, parse_rational


@dataclass(frozen=True)
class Form:
    """Homogeneous polynomial in n+1 variables as an exact coefficient map."""

    n: int
    deg: int
    coeffs: dict[MultiIndex, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean: dict[MultiIndex, Fraction] = {}
        for alpha, c in self.coeffs.items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.n + 1:
                raise ValueError(f"multi-index {alpha} does not have {self.n + 1} entries")
            if any(a < 0 for a in alpha):
                raise ValueError(f"multi-index {alpha} has negative entries")
            if sum(alpha) != self.deg:
                raise ValueError(f"multi-index {alpha} does not have degree {self.deg}")
            c = Fraction(c)
            if c != 0:
                clean[alpha] = clean.get(alpha, Fraction(0)) + c
        object.__setattr__(self, "coeffs", {a: c for a, c in sorted(clean.items()) if c != 0})

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def coefficient(self, alpha: MultiIndex) -> Fraction:
        return self.coeffs.get(tuple(alpha), Fraction(0))

    def __add__(self, other: "Form") -> "Form":
        if (self.n, self.deg) != (other.n, other.deg):
            raise ValueError("cannot add forms of different shape")
        merged = dict(self.coeffs)
        for a, c in other.coeffs.items():
            merged[a] = merged.get(a, Fraction(0)) + c
        return Form(self.n, self.deg, merged)

    def __sub__(self, other: "Form") -> "Form":
        return self + other.scale(-1)

    def scale(self, c) -> "Form":
        c = Fraction(c)
        return Form(self.n, self.deg, {a: v * c for a, v in self.coeffs.items()})

    def __mul__(self, other: "Form") -> "Form":
        if self.n != other.n:
            raise ValueError("cannot multiply forms in different variables")
        prod: dict[MultiIndex, Fraction] = {}
        for a, ca in self.coeffs.items():
            for b, cb in other.coeffs.items():
                key = tuple(x + y for x, y in zip(a, b))
                prod[key] = prod.get(key, Fraction(0)) + ca * cb
        return Form(self.n, self.deg + other.deg, prod)

    def evaluate(self, x):
        """Sum of c_alpha * x^alpha; exact when every coordinate is rational."""
        if len(x) != self.n + 1:
            raise ValueError(f"point has {len(x)} coordinates, need {self.n + 1}")
        total = None
        for alpha, c in self.coeffs.items():
            term = c * monomial_eval(alpha, x)
            total = term if total is None else total + term
        if total is None:
            return Fraction(0) if _all_rational(x) else 0.0
        return total

    def evaluate_float(self, x) -> float:
        return float(self.evaluate([float(v) for v in x]))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "deg": self.deg,
            "coeffs": [{"alpha": list(a), "c": format_rational(c)} for a, c in self.coeffs.items()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Form":
        coeffs = {tuple(item["alpha"]): parse_rational(item["c"]) for item in data["coeffs"]}
        return cls(int(data["n"]), int(data["deg"]), coeffs)


def _all_rational(x) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in x)


def zero_form(n: int, deg: int) -> Form:
    return Form(n, deg, {})


def monomial_form(n: int, alpha: MultiIndex, c=1) -> Form:
    return Form(n, sum(alpha), {tuple(alpha): Fraction(c)})


class HilbertCase(enum.Enum):
    EQUAL = "equal"
    STRICT = "strict"


def classify_hilbert_case(n: int, deg: int) -> HilbertCase:
    """Whether every PSD (n+1)-ary form of even degree `deg` is SOS.

    Equality holds exactly for binary forms, quadratic forms and ternary
    quartics; everywhere else the SOS cone is strictly smaller.
    """
    if n < 1 or deg < 2 or deg % 2 != 0:
        raise ValueError("need n >= 1 and even deg >= 2")
    if n + 1 == 2 or deg == 2 or (n + 1, deg) == (3, 4):
        return HilbertCase.EQUAL
    return HilbertCase.STRICT


def motzkin() -> Form:
    """The ternary sextic X0^4 X1^2 + X0^2 X1^4 + X2^6 - 3 X0^2 X1^2 X2^2."""
    return Form(2, 6, {
        (4, 2, 0): Fraction(1),
        (2, 4, 0): Fraction(1),
        (0, 0, 6): Fraction(1),
        (2, 2, 2): Fraction(-3),
    })


def quartic_psd_not_sos() -> Form:
    """Quaternary quartic W^4 + X^2Y^2 + Y^2Z^2 + X^2Z^2 - 4XYZW.

    PSD by the arithmetic-geometric mean inequality on the four monomials
    (their geometric mean is |XYZW|); not SOS, which the test suite certifies
    with a dual-point certificate computed in-repo.
    """
    return Form(3, 4, {
        (0, 0, 0, 4): Fraction(1),
        (2, 2, 0, 0): Fraction(1),
        (0, 2, 2, 0): Fraction(1),
        (2, 0, 2, 0): Fraction(1),
        (1, 1, 1, 1): Fraction(-4),
    })


def basis_sos(n: int, d: int) -> Form:
    """Sum of squares of every degree-d monomial; interior reference point."""
    basis = ordered_basis(n, d, MonomialOrder.LEX_DESC)
    coeffs: dict[MultiIndex, Fraction] = {}
    for alpha in basis.entries:
        key = tuple(2 * a for a in alpha)
        coeffs[key] = coeffs.get(key, Fraction(0)) + 1
    return Form(n, 2 * d, coeffs)


def corpus(name: str, n: int | None = None, d: int | None = None) -> Form:
    """Named fixtures: motzkin, quartic_psd_not_sos, basis_sos(n,d), zero(n,d)."""
    if name == "motzkin":
        return motzkin()
    if name == "quartic_psd_not_sos":
        return quartic_psd_not_sos()
    if name == "basis_sos":
        if n is None or d is None:
            raise ValueError("basis_sos needs n and d")
        return basis_sos(n, d)
    if name == "zero":
        if n is None or d is None:
            raise ValueError("zero needs n and d")
        return zero_form(n, 2 * d)
    raise ValueError(f"unknown corpus form {name!r}")


def random_form(rng: random.Random, n: int, deg: int, max_num: int = 9, max_den: int = 4) -> Form:
    """Dense random form with small rational coefficients; deterministic in rng."""
    coeffs = {}
    from .monomials import degree_indices

    for alpha in degree_indices(n + 1, deg):
        num = rng.randint(-max_num, max_num)
        den = rng.randint(1, max_den)
        if num != 0:
            coeffs[alpha] = Fraction(num, den)
    return Form(n, deg, coeffs)


def random_sos(seed: int, n: int, d: int, terms: int) -> tuple[Form, list[Form]]:
    """f = sum of `terms` squares of random rational degree-d forms.

    The expansion is exact, so f is SOS by construction with the returned
    witness list; deterministic in the seed.
    """
    if terms < 1:
        raise ValueError("need at least one square")
    rng = random.Random(seed)
    witnesses = []
    total = zero_form(n, 2 * d)
    for _ in range(terms):
        g = random_form(rng, n, d)
        witnesses.append(g)
        total = total + (g * g)
    return total, witnesses
