import random
from fractions import Fraction

from psdlab.exactla import determinant, feasible_point, nullspace, rref, solve
from psdlab.rational import format_rational, parse_rational, square_weights

F = Fraction


def test_rref_pivots():
    rows, pivots = rref([[F(2), F(4)], [F(1), F(2)]])
    assert pivots == [0]
    assert rows[0] == [F(1), F(2)]


def test_nullspace_simple():
    basis = nullspace([[F(1), F(1), F(0)], [F(0), F(0), F(1)]])
    assert len(basis) == 1
    v = basis[0]
    assert v[0] + v[1] == 0 and v[2] == 0


def test_solve_consistent_and_inconsistent():
    x = solve([[F(2), F(0)], [F(0), F(3)]], [F(4), F(9)])
    assert x == [F(2), F(3)]
    assert solve([[F(1), F(1)], [F(2), F(2)]], [F(1), F(3)]) is None


def test_determinant():
    assert determinant([[F(1), F(2)], [F(2), F(1)]]) == -3
    assert determinant([[F(2), F(0)], [F(0), F(5)]]) == 10
    assert determinant([[F(1), F(2)], [F(2), F(4)]]) == 0


def test_determinant_random_vs_cofactor():
    def cofactor(m):
        n = len(m)
        if n == 1:
            return m[0][0]
        total = F(0)
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for row in m[1:]]
            total += (-1) ** j * m[0][j] * cofactor(minor)
        return total

    rng = random.Random(4)
    for _ in range(20):
        n = rng.randint(1, 4)
        m = [[F(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(n)] for _ in range(n)]
        assert determinant(m) == cofactor(m)


def test_feasible_point_basic():
    x = feasible_point([[F(1), F(1)]], [F(1)])
    assert x is not None and x[0] + x[1] == 1 and all(v >= 0 for v in x)
    # x1 - x2 = 1, x1 + x2 = -1 has no nonnegative solution
    assert feasible_point([[F(1), F(-1)], [F(1), F(1)]], [F(1), F(-1)]) is None


def test_feasible_point_negative_rhs_ok():
    x = feasible_point([[F(-2), F(0), F(1)]], [F(-3)])
    assert x is not None
    assert -2 * x[0] + x[2] == -3


def test_feasible_point_random_systems():
    rng = random.Random(11)
    for _ in range(30):
        m, n = rng.randint(1, 4), rng.randint(2, 7)
        target = [F(rng.randint(0, 3), rng.randint(1, 2)) for _ in range(n)]
        a = [[F(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(n)] for _ in range(m)]
        b = [sum(a[i][j] * target[j] for j in range(n)) for i in range(m)]
        x = feasible_point(a, b)
        assert x is not None  # target is a nonneg solution, so one must exist
        for i in range(m):
            assert sum(a[i][j] * x[j] for j in range(n)) == b[i]
        assert all(v >= 0 for v in x)


def test_rational_wire_format():
    assert format_rational(F(3, 4)) == "3/4"
    assert format_rational(5) == "5/1"
    assert parse_rational("3/4") == F(3, 4)
    assert parse_rational("-7/2") == F(-7, 2)


def test_square_weights():
    for lam in [F(0), F(1), F(4, 9), F(2), F(7, 5), F(30, 7), F(123456, 789)]:
        parts = square_weights(lam)
        assert sum(a * a for a in parts) == lam
        assert len(parts) <= 4
    assert square_weights(F(9, 4)) == [F(3, 2)]


def test_square_weights_large():
    lam = F(10**30 + 7, 10**9 + 9)
    parts = square_weights(lam)
    assert sum(a * a for a in parts) == lam
