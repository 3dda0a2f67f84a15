import itertools
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psdlab.monomials import (
    Comparison,
    MonomialOrder,
    compare,
    degree_indices,
    k_of,
    monomial_eval,
    ordered_basis,
)

LEX = MonomialOrder.LEX_DESC
EX34 = MonomialOrder.EXAMPLE34


def brute_degree_set(nvars, d):
    return {a for a in itertools.product(range(d + 1), repeat=nvars) if sum(a) == d}


def test_k_of_values():
    assert k_of(2, 5) == 20
    assert k_of(1, 1) == 1
    assert k_of(2, 3) == comb(5, 2) - 1 == 9


def test_k_of_rejects_bad_input():
    with pytest.raises(ValueError):
        k_of(0, 3)
    with pytest.raises(ValueError):
        k_of(2, 0)


def test_k_of_large_exact():
    # Python integers are exact at any size; no silent wrap possible.
    assert k_of(30, 40) == comb(70, 30) - 1


def test_lex_basis_2_3_explicit():
    expected = [(3, 0, 0), (2, 1, 0), (2, 0, 1), (1, 2, 0), (1, 1, 1),
                (1, 0, 2), (0, 3, 0), (0, 2, 1), (0, 1, 2), (0, 0, 3)]
    assert list(ordered_basis(2, 3, LEX).entries) == expected
    # independent oracle: exhaustive enumeration sorted by tuple order
    assert expected == sorted(brute_degree_set(3, 3), reverse=True)


def test_example34_first_six_match_ternary_decics():
    b = ordered_basis(2, 5, EX34)
    assert b.entries[:6] == ((5, 0, 0), (4, 1, 0), (3, 2, 0), (2, 3, 0), (1, 4, 0), (0, 5, 0))


def test_basis_1_1():
    assert list(ordered_basis(1, 1, LEX).entries) == [(1, 0), (0, 1)]


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
def test_basis_sizes_and_set_equality(n, d):
    for order in (LEX, EX34):
        if order is EX34 and n > 3:
            continue
        b = ordered_basis(n, d, order)
        assert len(b.entries) == k_of(n, d) + 1 == comb(n + d, n)
        assert set(b.entries) == brute_degree_set(n + 1, d)
        assert len(set(b.entries)) == len(b.entries)


@pytest.mark.parametrize("n,d", [(2, 3), (3, 2), (2, 5)])
def test_basis_endpoints_lex(n, d):
    b = ordered_basis(n, d, LEX)
    assert b.entries[0] == (d,) + (0,) * n
    assert b.entries[-1] == (0,) * n + (d,)


def test_compare_examples():
    assert compare(EX34, (4, 1, 0), (5, 0, 0)) is Comparison.LT
    assert compare(LEX, (3, 0, 0), (2, 1, 0)) is Comparison.GT
    assert compare(LEX, (1, 1, 1), (1, 1, 1)) is Comparison.EQ
    assert compare(EX34, (2, 2, 1), (2, 2, 1)) is Comparison.EQ


def test_compare_degree_mismatch():
    with pytest.raises(ValueError):
        compare(LEX, (1, 0), (1, 1))


def index_triples(nvars, d):
    pool = sorted(brute_degree_set(nvars, d))
    return st.tuples(st.sampled_from(pool), st.sampled_from(pool), st.sampled_from(pool))


@settings(max_examples=200, deadline=None)
@given(index_triples(3, 4), st.sampled_from([LEX, EX34]))
def test_order_axioms(triple, order):
    a, b, c = triple
    ca, cb = compare(order, a, b), compare(order, b, a)
    # antisymmetry / totality
    assert ca is Comparison.EQ if a == b else ca is not Comparison.EQ
    assert ca.value == -cb.value
    # transitivity
    if compare(order, a, b) is not Comparison.GT and compare(order, b, c) is not Comparison.GT:
        assert compare(order, a, c) is not Comparison.GT
    # translation compatibility: a < b implies a+g < b+g
    g = (1, 0, 2)
    if ca is Comparison.LT:
        assert compare(order, tuple(x + y for x, y in zip(a, g)),
                       tuple(x + y for x, y in zip(b, g))) is Comparison.LT


def test_example34_not_total_beyond_four_vars():
    with pytest.raises(ValueError):
        compare(EX34, (1, 0, 0, 1, 0), (1, 0, 0, 0, 1))


def test_monomial_eval():
    assert monomial_eval((2, 1, 0), (2, 3, 5)) == 12
    assert monomial_eval((0, 0, 3), (0, 0, 1)) == 1
    assert monomial_eval((1, 2), (0, 5)) == 0
    # 0^0 = 1 convention
    assert monomial_eval((0, 2), (0, 3)) == 9
    assert monomial_eval((0, 0), (0.0, 0.0)) == 1


def test_monomial_eval_exact_rational():
    v = monomial_eval((2, 1), (Fraction(1, 3), Fraction(2, 5)))
    assert v == Fraction(2, 45)


def test_degree_indices_count():
    for nvars in (2, 3, 4):
        for d in (1, 2, 3, 4):
            assert len(degree_indices(nvars, d)) == comb(nvars - 1 + d, d)


def test_basis_sizes_up_to_six():
    for n in range(1, 7):
        for d in range(1, 7):
            assert len(ordered_basis(n, d, LEX).entries) == k_of(n, d) + 1
