import random
from fractions import Fraction
from math import comb

import pytest

from psdlab.exactla import solve
from psdlab.forms import Form, basis_sos, random_form
from psdlab.gram import (
    SymMat,
    a_index_set,
    canonical_gram,
    filtration,
    gram_apply,
    kernel_basis,
    quadric_step,
    separation_pattern,
)
from psdlab.monomials import MonomialOrder, monomial_vector, ordered_basis

LEX = MonomialOrder.LEX_DESC
EX34 = MonomialOrder.EXAMPLE34
F = Fraction


def test_symmat_rejects_asymmetry():
    with pytest.raises(ValueError):
        SymMat(((F(1), F(2)), (F(3), F(1))))


def test_gram_apply_binary_quadratic():
    a, b, c = F(1), F(2), F(3)
    m = SymMat(((a, b), (b, c)))
    f = gram_apply(m, ordered_basis(1, 1))
    assert f.coeffs == {(2, 0): a, (1, 1): 2 * b, (0, 2): c}


@pytest.mark.parametrize("n,d", [(1, 2), (2, 2), (2, 3)])
def test_gram_apply_identity_is_basis_sos(n, d):
    basis = ordered_basis(n, d)
    assert gram_apply(SymMat.identity(basis.k + 1), basis) == basis_sos(n, d)


def test_canonical_gram_equal_split():
    basis = ordered_basis(1, 2)
    f = Form(1, 4, {(2, 2): F(1)})
    a = canonical_gram(f, basis)
    assert a[0, 2] == F(1, 4) and a[2, 0] == F(1, 4) and a[1, 1] == F(1, 2)
    assert gram_apply(a, basis) == f


def test_canonical_gram_pure_power():
    basis = ordered_basis(2, 3)
    f = Form(2, 6, {(6, 0, 0): F(1)})
    a = canonical_gram(f, basis)
    assert a[0, 0] == 1
    assert sum(1 for s, t, v in a.nonzero_items()) == 1


@pytest.mark.parametrize("n,d", [(1, 2), (2, 2), (2, 3)])
def test_canonical_gram_section_roundtrip(n, d):
    rng = random.Random(100 * n + d)
    basis = ordered_basis(n, d)
    for _ in range(100):
        f = random_form(rng, n, 2 * d)
        assert gram_apply(canonical_gram(f, basis), basis) == f


@pytest.mark.parametrize("n,d,count", [(1, 2, 1), (2, 2, 6), (2, 3, 27), (3, 2, 20), (1, 1, 0)])
def test_kernel_counts(n, d, count):
    assert len(kernel_basis(n, d)) == count
    assert count == (k := ordered_basis(n, d).k, (k + 1) * (k + 2) // 2 - comb(n + 2 * d, n))[1]


def test_kernel_1_2_is_hankel_relation():
    (b,) = kernel_basis(1, 2)
    # spanned by the matrix of Z0 Z2 - Z1^2
    assert b[0, 2] != 0
    assert gram_apply(b, ordered_basis(1, 2)) == Form(1, 4, {})


@pytest.mark.parametrize("n,d", [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2), (2, 4)])
def test_kernel_dimension_formula_and_vanishing(n, d):
    basis = ordered_basis(n, d)
    kern = kernel_basis(n, d)
    assert len(kern) == (basis.k + 1) * (basis.k + 2) // 2 - comb(n + 2 * d, n)
    rng = random.Random(7)
    for b in kern:
        assert gram_apply(b, basis) == Form(n, 2 * d, {})
    # float vanishing at 100 random real points, exact at rational points
    for _ in range(100):
        x = [rng.gauss(0, 1) for _ in range(n + 1)]
        z = monomial_vector(basis, x)
        for b in kern[:5]:
            val = sum(float(v) * z[s] * z[t] * (1 if s == t else 2) for s, t, v in b.nonzero_items())
            assert abs(val) <= 1e-10 * max(1.0, sum(abs(zz) for zz in z) ** 2)
    xq = tuple(F(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(n + 1))
    zq = monomial_vector(basis, xq)
    for b in kern:
        val = sum(v * zq[s] * zq[t] * (1 if s == t else 2) for s, t, v in b.nonzero_items())
        assert val == 0


def test_quadric_step_lex_2_3():
    basis = ordered_basis(2, 3)
    step = quadric_step(basis, 1)
    assert (step.s, step.t, step.coord) == (1, 1, 3)
    assert step.binomial() == "Z0*Z3 - Z1^2"
    # exhaustive pair-search oracle for the target
    target = tuple(a + b for a, b in zip(basis.entries[0], basis.entries[3]))
    pairs = [(s, t) for s in range(1, 10) for t in range(s, 10)
             if tuple(x + y for x, y in zip(basis.entries[s], basis.entries[t])) == target]
    assert min(pairs) == (1, 1)


def test_quadric_steps_example34():
    basis = ordered_basis(2, 5, EX34)
    assert quadric_step(basis, 1) is None
    assert quadric_step(basis, 6) is None
    binomials = [quadric_step(basis, j).binomial() for j in range(2, 6)]
    assert binomials == ["Z0*Z2 - Z1^2", "Z0*Z3 - Z1*Z2", "Z0*Z4 - Z1*Z3", "Z0*Z5 - Z1*Z4"]


def test_quadric_matrices_in_kernel_span():
    basis = ordered_basis(2, 3)
    kern = kernel_basis(2, 3)
    for j in (1, 3, 5):
        q = quadric_step(basis, j)
        assert gram_apply(q.matrix, basis) == Form(2, 6, {})
        # solve the exact linear system: q.matrix = sum c_l B_l
        entries = [(s, t) for s in range(10) for t in range(s, 10)]
        rows = [[b[s, t] for b in kern] for (s, t) in entries]
        rhs = [q.matrix[s, t] for (s, t) in entries]
        assert solve(rows, rhs) is not None


def test_quadric_involves_only_earlier_coordinates():
    # any monomial order: the pair for coordinate c uses s, t < c
    for order in (LEX, EX34):
        basis = ordered_basis(2, 4, order)
        desc = filtration(2, 4, order)
        for step in desc.present_quadrics():
            assert 1 <= step.s <= step.t < step.coord


def test_filtration_lex_2_5():
    desc = filtration(2, 5)
    assert len(desc.steps) == 18
    assert desc.absent_steps == ()
    assert desc.varieties == 18
    assert desc.strict_count == 14
    assert desc.collapse is None


def test_filtration_example34_2_5():
    desc = filtration(2, 5, EX34)
    assert len(desc.steps) == 20
    assert desc.absent_steps == (1, 6)
    assert desc.varieties == 18
    assert desc.collapse == 4
    assert desc.strict_bound == 13
    # paper's renumbering: the variety after raw step 7 is H_5, after step m >= 8 it is H_{m-2}
    assert desc.variety_of_step[7 - 1] == 5
    for m in range(8, 21):
        assert desc.variety_of_step[m - 1] == m - 2


def test_filtration_binary_forms():
    for d in (2, 3, 5):
        desc = filtration(1, d)
        assert len(desc.steps) == d - 1
        assert desc.absent_steps == ()


def test_lex_steps_always_present_small_cases():
    for n in (1, 2, 3):
        for d in (1, 2, 3, 4, 5):
            desc = filtration(n, d)
            assert desc.absent_steps == (), (n, d)


def test_fixed_coordinates_maps():
    lex = filtration(2, 3)
    assert lex.fixed_coordinates(0) == 3
    assert lex.fixed_coordinates(1) == 4
    assert lex.fixed_coordinates(7) == 10
    e34 = filtration(2, 5, EX34)
    assert e34.fixed_coordinates(0) == 1
    assert e34.fixed_coordinates(1) == 3   # H_1 = T_2
    assert e34.fixed_coordinates(5) == 8   # H_5 = T_7
    assert e34.fixed_coordinates(18) == 21


def test_separation_patterns():
    pattern, strict = separation_pattern(2, 5)
    assert strict == 14
    pattern, strict = separation_pattern(2, 3)
    assert pattern == "C_0=C_1=C_2=C_3 < C_4 < C_5 < C_6 < C_7"
    assert strict == 3
    pattern, strict = separation_pattern(1, 7)
    assert strict == 0 and "<" not in pattern
    _, strict = separation_pattern(3, 2)
    assert strict == 2


def test_collapse_detection():
    assert filtration(2, 5, EX34).collapse == 4
    assert filtration(2, 5, LEX).collapse is None
    assert filtration(2, 1, EX34).collapse is None
    # ternary ex34 collapses at d-1 in general
    assert filtration(2, 4, EX34).collapse == 3


def test_a_index_set():
    s = a_index_set(2, 3, 0)
    assert s == {(6, 0, 0), (5, 1, 0), (5, 0, 1), (4, 2, 0), (4, 1, 1), (4, 0, 2)}
    assert a_index_set(1, 1, 0) == {(2, 0), (1, 1), (0, 2)}
    # full level reaches every degree-2d index
    from psdlab.monomials import degree_indices

    for n, d in [(1, 2), (2, 2), (2, 3)]:
        k = ordered_basis(n, d).k
        assert a_index_set(n, d, k - n) == set(degree_indices(n + 1, 2 * d))


def test_filtration_json_shape():
    data = filtration(2, 3).to_json()
    assert data["steps"][0] == {"j": 1, "coord": 3, "s": 1, "t": 1,
                                "binomial": "Z0*Z3 - Z1^2", "affine": "Z3 - Z1^2"}
    assert data["k"] == 9 and data["varieties"] == 7


def test_gram_space_invariants():
    from psdlab.gram import gram_space

    rng = random.Random(31)
    f = random_form(rng, 2, 4)
    space = gram_space(f)
    basis = ordered_basis(2, 2)
    assert gram_apply(space.base, basis) == f
    for b in space.kernel:
        assert gram_apply(b, basis) == Form(2, 4, {})
    k = basis.k
    assert len(space.kernel) == (k + 1) * (k + 2) // 2 - comb(2 + 4, 2)


def test_example34_affine_quadrics():
    desc = filtration(2, 5, EX34)
    affine = [q.affine() for q in desc.present_quadrics()[:4]]
    assert affine == ["Z2 - Z1^2", "Z3 - Z1*Z2", "Z4 - Z1*Z3", "Z5 - Z1*Z4"]
    data = desc.to_json()
    assert data["collapse_certificate"] == {"degree": 5, "codim": 4, "hilbert_polynomial": "5T+1"}
