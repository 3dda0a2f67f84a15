"""The Gram correspondence between symmetric matrices and even-degree forms.

For the degree-d monomial basis m_0 > ... > m_k, a symmetric (k+1)x(k+1)
matrix A maps to the form q_A(m_0(X), ..., m_k(X)).  This module builds that
map exactly, a canonical section of it, a sparse basis of its kernel, the
step quadrics Z_0 Z_c - Z_s Z_t of the variety filtration, deduplication of
constraint-free steps under non-lex orders, the proven separation pattern of
the lex filtration, minimal-degree collapse detection, and the index sets of
pairwise sums used by the truncated moment side.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Optional

import numpy as np

from .forms import Form, HilbertCase, classify_hilbert_case
from .monomials import MonomialOrder, MultiIndex, OrderedBasis, k_of, ordered_basis
from .rational import format_rational, parse_rational


@dataclass(frozen=True)
class SymMat:
    """Dense symmetric matrix of exact rationals."""

    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        n = len(self.rows)
        rows = tuple(tuple(Fraction(v) for v in row) for row in self.rows)
        for row in rows:
            if len(row) != n:
                raise ValueError("matrix is not square")
        for s in range(n):
            for t in range(s + 1, n):
                if rows[s][t] != rows[t][s]:
                    raise ValueError(f"matrix is not symmetric at ({s},{t})")
        object.__setattr__(self, "rows", rows)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, st: tuple[int, int]) -> Fraction:
        s, t = st
        return self.rows[s][t]

    def __add__(self, other: "SymMat") -> "SymMat":
        return SymMat(tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.rows, other.rows)))

    def __sub__(self, other: "SymMat") -> "SymMat":
        return SymMat(tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(self.rows, other.rows)))

    def scale(self, c) -> "SymMat":
        c = Fraction(c)
        return SymMat(tuple(tuple(c * v for v in row) for row in self.rows))

    def inner(self, other: "SymMat") -> Fraction:
        """Frobenius pairing, exact."""
        return sum(a * b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb))

    def nonzero_items(self):
        """Upper-triangle nonzero entries as (s, t, value)."""
        for s in range(self.dim):
            for t in range(s, self.dim):
                v = self.rows[s][t]
                if v != 0:
                    yield s, t, v

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.rows], dtype=float)

    def to_json(self) -> dict:
        return {"dim": self.dim, "entries": [[format_rational(v) for v in row] for row in self.rows]}

    @classmethod
    def from_json(cls, data: dict) -> "SymMat":
        return cls(tuple(tuple(parse_rational(v) for v in row) for row in data["entries"]))

    @classmethod
    def zeros(cls, dim: int) -> "SymMat":
        z = Fraction(0)
        return cls(tuple(tuple(z for _ in range(dim)) for _ in range(dim)))

    @classmethod
    def identity(cls, dim: int) -> "SymMat":
        return cls(tuple(tuple(Fraction(1 if s == t else 0) for t in range(dim)) for s in range(dim)))

    @classmethod
    def from_entries(cls, dim: int, entries: dict[tuple[int, int], Fraction]) -> "SymMat":
        rows = [[Fraction(0)] * dim for _ in range(dim)]
        for (s, t), v in entries.items():
            rows[s][t] = Fraction(v)
            rows[t][s] = Fraction(v)
        return cls(tuple(tuple(row) for row in rows))

    @classmethod
    def from_numpy(cls, arr: np.ndarray, cap: int) -> "SymMat":
        dim = arr.shape[0]
        entries = {}
        for s in range(dim):
            for t in range(s, dim):
                entries[(s, t)] = Fraction(float((arr[s, t] + arr[t, s]) / 2.0)).limit_denominator(cap)
        return cls.from_entries(dim, entries)


@lru_cache(maxsize=None)
def pair_table(n: int, d: int, order: MonomialOrder = MonomialOrder.LEX_DESC):
    """For each degree-2d index beta, the unordered basis pairs summing to it.

    Returns (pairs, counts): pairs[beta] = [(s, t) with s <= t], sorted, and
    counts[beta] = number of *ordered* pairs (diagonal 1, off-diagonal 2).
    """
    basis = ordered_basis(n, d, order)
    pairs: dict[MultiIndex, list[tuple[int, int]]] = {}
    for s, a in enumerate(basis.entries):
        for t in range(s, len(basis.entries)):
            beta = tuple(x + y for x, y in zip(a, basis.entries[t]))
            pairs.setdefault(beta, []).append((s, t))
    counts = {beta: sum(1 if s == t else 2 for s, t in ps) for beta, ps in pairs.items()}
    return pairs, counts


def gram_apply(a: SymMat, basis: OrderedBasis) -> Form:
    """The degree-2d form of the quadratic q_A evaluated on the monomial vector."""
    if a.dim != basis.k + 1:
        raise ValueError(f"matrix dim {a.dim} does not match basis size {basis.k + 1}")
    coeffs: dict[MultiIndex, Fraction] = {}
    for s, t, v in a.nonzero_items():
        beta = tuple(x + y for x, y in zip(basis.entries[s], basis.entries[t]))
        weight = v if s == t else 2 * v
        coeffs[beta] = coeffs.get(beta, Fraction(0)) + weight
    return Form(basis.n, 2 * basis.d, coeffs)


def canonical_gram(f: Form, basis: OrderedBasis) -> SymMat:
    """The equal-split section: each coefficient is spread evenly over its pairs.

    Every unordered pair {s,t} with alpha_s + alpha_t = beta receives the same
    share c_beta / #pairs of the coefficient; off-diagonal entries therefore
    carry half their share.  gram_apply inverts this exactly.
    """
    if f.deg != 2 * basis.d or f.n != basis.n:
        raise ValueError("form shape does not match basis")
    pairs, _ = pair_table(basis.n, basis.d, basis.order)
    entries: dict[tuple[int, int], Fraction] = {}
    for beta, c in f.coeffs.items():
        ps = pairs.get(beta)
        if not ps:
            raise ValueError(f"coefficient at unattainable index {beta}")
        share = c / len(ps)
        for s, t in ps:
            entries[(s, t)] = entries.get((s, t), Fraction(0)) + (share if s == t else share / 2)
    return SymMat.from_entries(basis.k + 1, entries)


@lru_cache(maxsize=None)
def kernel_basis_cached(n: int, d: int, order: MonomialOrder = MonomialOrder.LEX_DESC) -> tuple[SymMat, ...]:
    """Sparse basis of the Gram kernel, one difference matrix per extra pair.

    For each ambiguous degree-2d index the first (lex-least) pair is the pivot
    and every other pair contributes one element: + on itself, - on the pivot,
    scaled so gram_apply vanishes exactly.  Triangular by construction, hence
    independent; the count matches dim Sym - dim F_{n+1,2d}.
    """
    basis = ordered_basis(n, d, order)
    pairs, _ = pair_table(n, d, order)
    out = []
    for beta in sorted(pairs):
        ps = pairs[beta]
        if len(ps) < 2:
            continue
        pivot = ps[0]
        pw = Fraction(1) if pivot[0] == pivot[1] else Fraction(1, 2)
        for other in ps[1:]:
            ow = Fraction(1) if other[0] == other[1] else Fraction(1, 2)
            entries = {other: ow, pivot: -pw}
            out.append(SymMat.from_entries(basis.k + 1, entries))
    expected = (basis.k + 1) * (basis.k + 2) // 2 - comb(n + 2 * d, n)
    assert len(out) == expected, (len(out), expected)
    return tuple(out)


def kernel_basis(n: int, d: int, order: MonomialOrder = MonomialOrder.LEX_DESC) -> list[SymMat]:
    return list(kernel_basis_cached(n, d, order))


@dataclass(frozen=True)
class GramSpace:
    """The affine fiber of all Gram matrices of a fixed form."""

    f: Form
    base: SymMat
    kernel: tuple[SymMat, ...]


def gram_space(f: Form, order: MonomialOrder = MonomialOrder.LEX_DESC) -> GramSpace:
    if f.deg % 2 != 0:
        raise ValueError("gram fiber needs an even-degree form")
    basis = ordered_basis(f.n, f.deg // 2, order)
    return GramSpace(f=f, base=canonical_gram(f, basis), kernel=kernel_basis_cached(f.n, f.deg // 2, order))


@dataclass(frozen=True)
class QuadricStep:
    """The binomial quadric Z_0 Z_coord - Z_s Z_t attached to one raw step."""

    j: int          # raw step index within the order's chain, 1-based
    coord: int      # basis coordinate fixed at this step
    s: int
    t: int
    matrix: SymMat

    def binomial(self) -> str:
        left = f"Z0*Z{self.coord}"
        right = f"Z{self.s}^2" if self.s == self.t else f"Z{self.s}*Z{self.t}"
        return f"{left} - {right}"

    def affine(self) -> str:
        """Dehomogenization at Z0 = 1, cutting the same affine chart."""
        right = f"Z{self.s}^2" if self.s == self.t else f"Z{self.s}*Z{self.t}"
        return f"Z{self.coord} - {right}"

    def to_json(self) -> dict:
        return {"j": self.j, "coord": self.coord, "s": self.s, "t": self.t,
                "binomial": self.binomial(), "affine": self.affine()}


def base_block(order: MonomialOrder, n: int) -> int:
    """Coordinates fixed before the first raw step: n+1 for lex, 1 otherwise.

    The lex chain starts from the block (z_0, ..., z_n), which is known to be
    constraint-free; the alternative-order chain examines every coordinate in
    turn starting from z_0 alone.
    """
    return n + 1 if order is MonomialOrder.LEX_DESC else 1


def quadric_for_coordinate(basis: OrderedBasis, coord: int) -> Optional[QuadricStep]:
    """Least (s, t), 1 <= s <= t, with alpha_s + alpha_t = alpha_0 + alpha_coord."""
    if not 1 <= coord <= basis.k:
        raise ValueError(f"coordinate {coord} out of range 1..{basis.k}")
    target = tuple(x + y for x, y in zip(basis.entries[0], basis.entries[coord]))
    lookup = basis._lookup()
    for s in range(1, basis.k + 1):
        rest = tuple(b - a for a, b in zip(basis.entries[s], target))
        if any(r < 0 for r in rest):
            continue
        t = lookup.get(rest)
        if t is not None and t >= s:
            entries = {(0, coord): Fraction(1, 2)}
            key = (s, t)
            entries[key] = entries.get(key, Fraction(0)) + (Fraction(-1) if s == t else Fraction(-1, 2))
            return QuadricStep(j=0, coord=coord, s=s, t=t, matrix=SymMat.from_entries(basis.k + 1, entries))
    return None


def quadric_step(basis: OrderedBasis, j: int) -> Optional[QuadricStep]:
    """Quadric of the j-th raw step of the chain for this basis' order.

    Under lex the j-th step fixes coordinate n+j (j = 1..k-n, never absent);
    under the alternative order it fixes coordinate j (j = 1..k) and may be
    absent when no pair represents alpha_0 + alpha_j.
    """
    offset = base_block(basis.order, basis.n) - 1
    last = basis.k - offset
    if not 1 <= j <= last:
        raise ValueError(f"step {j} out of range 1..{last}")
    step = quadric_for_coordinate(basis, offset + j)
    if step is None:
        return None
    return QuadricStep(j=j, coord=step.coord, s=step.s, t=step.t, matrix=step.matrix)


@dataclass(frozen=True)
class FiltrationDescriptor:
    """Raw steps, dedup bookkeeping and separation data of one cone chain."""

    n: int
    d: int
    order: MonomialOrder
    steps: tuple[Optional[QuadricStep], ...]   # one per raw step, None = no constraint
    variety_of_step: tuple[int, ...]           # raw step j -> variety index after dedup
    pattern: Optional[str]                     # lex only: proven =/strict chain
    strict_count: Optional[int]                # lex only: exact number of separating cones
    strict_bound: int                          # upper bound on separating cones
    collapse: Optional[int]                    # variety index where the chain collapses
    tie_break: str = "least-t"

    @property
    def k(self) -> int:
        return k_of(self.n, self.d)

    @property
    def varieties(self) -> int:
        """Number of deduped varieties beyond the ambient one."""
        return sum(1 for s in self.steps if s is not None)

    @property
    def absent_steps(self) -> tuple[int, ...]:
        return tuple(j + 1 for j, s in enumerate(self.steps) if s is None)

    def present_quadrics(self) -> list[QuadricStep]:
        return [s for s in self.steps if s is not None]

    def fixed_coordinates(self, level: int) -> int:
        """How many leading coordinates the level-i variety pins to monomials."""
        if level == 0:
            return base_block(self.order, self.n)
        quads = self.present_quadrics()
        if not 1 <= level <= len(quads):
            raise ValueError(f"level {level} out of range 0..{len(quads)}")
        return quads[level - 1].coord + 1

    def to_json(self) -> dict:
        collapse_certificate = None
        if self.collapse is not None:
            # multiple cone over the rational normal curve: Hilbert polynomial
            # d*T + 1, so degree d; degree = codim + 1 is the collapse witness
            collapse_certificate = {
                "degree": self.d,
                "codim": self.collapse,
                "hilbert_polynomial": f"{self.d}T+1",
            }
        return {
            "n": self.n,
            "d": self.d,
            "k": self.k,
            "order": self.order.value,
            "raw_steps": len(self.steps),
            "steps": [s.to_json() if s is not None else None for s in self.steps],
            "absent_steps": list(self.absent_steps),
            "varieties": self.varieties,
            "variety_of_step": list(self.variety_of_step),
            "pattern": self.pattern,
            "strict_count": self.strict_count,
            "strict_bound": self.strict_bound,
            "collapse": self.collapse,
            "collapse_certificate": collapse_certificate,
            "tie_break": self.tie_break,
        }


def minimal_degree_collapse(steps: tuple[Optional[QuadricStep], ...], basis: OrderedBasis) -> Optional[int]:
    """Collapse index when the leading block is a full two-variable run.

    If the basis starts with all d+1 degree-d monomials in two variables, the
    first raw steps cut out a multiple cone over the rational normal curve of
    degree d (its Hilbert polynomial is d*T + 1, so its degree is d).  With i
    deduped steps the codimension is i, and degree = codimension + 1 collapses
    the chain at level i.  Returns i, or None when the pattern is absent.
    """
    d = basis.d
    if basis.k < d or not steps:
        return None
    offset = base_block(basis.order, basis.n) - 1
    support: set[int] = set()
    for coord in range(0, d + 1):
        for var, e in enumerate(basis.entries[coord]):
            if e:
                support.add(var)
    if len(support) > 2:
        return None
    # The run must be the complete two-variable block, i.e. exactly the d+1
    # degree-d monomials in those variables.
    two_var = {alpha for alpha in basis.entries if sum(1 for e in alpha if e) <= 2
               and all(e == 0 or v in support for v, e in enumerate(alpha))}
    if set(basis.entries[: d + 1]) != two_var:
        return None
    last_raw = d - offset
    if last_raw < 1:
        return None
    i = sum(1 for s in steps[:last_raw] if s is not None)
    if i >= 1 and d == i + 1:
        return i
    return None


def filtration(n: int, d: int, order: MonomialOrder = MonomialOrder.LEX_DESC) -> FiltrationDescriptor:
    """Run every raw step, dedup absent ones, attach pattern and collapse data."""
    basis = ordered_basis(n, d, order)
    offset = base_block(order, n) - 1
    raw = basis.k - offset
    steps: list[Optional[QuadricStep]] = []
    variety_of_step: list[int] = []
    count = 0
    for j in range(1, raw + 1):
        step = quadric_step(basis, j)
        if step is not None:
            count += 1
        steps.append(step)
        variety_of_step.append(count)
    collapse = minimal_degree_collapse(tuple(steps), basis)
    pattern = strict = None
    if order is MonomialOrder.LEX_DESC:
        pattern, strict = separation_pattern(n, d)
        bound = strict
    else:
        bound = count - 1 if collapse is None else count - collapse - 1
        bound = max(bound, 0)
    return FiltrationDescriptor(
        n=n, d=d, order=order, steps=tuple(steps), variety_of_step=tuple(variety_of_step),
        pattern=pattern, strict_count=strict, strict_bound=bound, collapse=collapse,
    )


def separation_pattern(n: int, d: int) -> tuple[str, int]:
    """Proven =/strict pattern of the lex chain and its separating-cone count.

    In an equality case every inclusion is an equality.  Otherwise equalities
    run through C_{n+1} for n = 2 and through C_n for n >= 3, and every later
    inclusion is strict.
    """
    top = k_of(n, d) - n
    if classify_hilbert_case(n, 2 * d) is HilbertCase.EQUAL:
        labels = [f"C_{i}" for i in range(top + 1)]
        return "=".join(labels), 0
    eq_top = n + 1 if n == 2 else n
    eq_top = min(eq_top, top)
    parts = "=".join(f"C_{i}" for i in range(eq_top + 1))
    for i in range(eq_top + 1, top + 1):
        parts += f" < C_{i}"
    strict = max(top - 1 - eq_top, 0)
    return parts, strict


def a_index_set(n: int, d: int, i: int, order: MonomialOrder = MonomialOrder.LEX_DESC) -> set[MultiIndex]:
    """Pairwise sums of the first n+i+1 basis exponents."""
    basis = ordered_basis(n, d, order)
    if not 0 <= i <= basis.k - n:
        raise ValueError(f"index {i} out of range 0..{basis.k - n}")
    head = basis.entries[: n + i + 1]
    return {tuple(x + y for x, y in zip(a, b)) for a in head for b in head}
