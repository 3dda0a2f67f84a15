"""Exact linear algebra over the rationals.

Small dense systems only (desk scale); everything is Fraction arithmetic so
results are exact and deterministic.  Used to re-verify certificates, to solve
for exact dual weights, and to express quadrics in a kernel basis.
"""

from __future__ import annotations

from fractions import Fraction

Row = list[Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


def _as_rows(mat) -> list[Row]:
    return [[Fraction(x) for x in row] for row in mat]


def rref(mat) -> tuple[list[Row], list[int]]:
    """Reduced row echelon form; returns (rows, pivot column indices)."""
    rows = _as_rows(mat)
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = ONE / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def nullspace(mat) -> list[Row]:
    """Basis of {x : mat @ x = 0}, one vector per free column."""
    rows = _as_rows(mat)
    if not rows:
        return []
    ncols = len(rows[0])
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [ZERO] * ncols
        vec[fc] = ONE
        for r, pc in enumerate(pivots):
            vec[pc] = -red[r][fc]
        basis.append(vec)
    return basis


def solve(mat, rhs) -> Row | None:
    """One exact solution of mat @ x = rhs, or None if inconsistent."""
    rows = _as_rows(mat)
    b = [Fraction(x) for x in rhs]
    aug = [row + [bv] for row, bv in zip(rows, b)]
    red, pivots = rref(aug)
    ncols = len(rows[0]) if rows else 0
    if ncols in pivots:  # pivot in the augmented column
        return None
    x = [ZERO] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][ncols]
    return x


def determinant(mat) -> Fraction:
    rows = _as_rows(mat)
    n = len(rows)
    det = ONE
    for c in range(n):
        piv = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if piv is None:
            return ZERO
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            det = -det
        det *= rows[c][c]
        inv = ONE / rows[c][c]
        for i in range(c + 1, n):
            if rows[i][c] != 0:
                f = rows[i][c] * inv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return det


def feasible_point(a_eq, b_eq) -> Row | None:
    """Exact phase-1 simplex: find x >= 0 with a_eq @ x = b_eq, else None.

    Bland's rule, so it terminates; all arithmetic is rational.  Meant for
    small systems (tens of rows/columns) arising from certificate repair.
    """
    rows = _as_rows(a_eq)
    b = [Fraction(v) for v in b_eq]
    m = len(rows)
    if m == 0:
        return []
    n = len(rows[0])
    # Make rhs non-negative, then add one artificial per row.
    for i in range(m):
        if b[i] < 0:
            rows[i] = [-v for v in rows[i]]
            b[i] = -b[i]
    # Tableau columns: n structural + m artificial + rhs.
    tab = [rows[i] + [ONE if j == i else ZERO for j in range(m)] + [b[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    # Objective: minimize sum of artificials. cost row = -(sum of rows) over
    # artificial-basic rows, expressed in reduced form.
    cost = [ZERO] * (n + m) + [ZERO]
    for i in range(m):
        for j in range(n + m + 1):
            cost[j] -= tab[i][j]

    total = n + m
    while True:
        enter = next((j for j in range(total) if cost[j] < 0), None)
        if enter is None:
            break
        # Bland: smallest ratio, ties by smallest basis index.
        leave, best = None, None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][total] / tab[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            return None  # unbounded phase 1: cannot happen, defensive
        piv = tab[leave][enter]
        tab[leave] = [v / piv for v in tab[leave]]
        for i in range(m):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [a - f * p for a, p in zip(tab[i], tab[leave])]
        if cost[enter] != 0:
            f = cost[enter]
            cost = [a - f * p for a, p in zip(cost, tab[leave])]
        basis[leave] = enter

    if -cost[total] != 0:  # optimal phase-1 value > 0: infeasible
        return None
    x = [ZERO] * n
    for i, bi in enumerate(basis):
        if bi < n:
            x[bi] = tab[i][total]
        elif tab[i][total] != 0:
            return None  # artificial stuck at positive level, defensive
    return x
