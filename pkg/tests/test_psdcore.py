import random
from fractions import Fraction

import numpy as np
import pytest

from psdlab.gram import SymMat, quadric_step
from psdlab.monomials import ordered_basis
from psdlab.psdcore import (
    IndefiniteWitness,
    LdltFactorization,
    eigen_sym,
    factor_psd,
    is_psd,
    is_psd_exact,
    ldlt,
    principal_minors_nonneg,
    psd_project,
)

F = Fraction


def test_eigen_identity():
    s = eigen_sym(np.eye(3))
    assert s.eigenvalues == (1.0, 1.0, 1.0)


def test_eigen_2x2():
    # characteristic polynomial lambda^2 - 2 lambda - 3 has roots 3, -1
    s = eigen_sym([[1.0, 2.0], [2.0, 1.0]])
    assert abs(s.eigenvalues[0] - 3) < 1e-12 and abs(s.eigenvalues[1] + 1) < 1e-12


def test_eigen_diagonal():
    s = eigen_sym(np.diag([5.0, 0.0, -2.0]))
    assert s.eigenvalues == (5.0, 0.0, -2.0)


def test_eigen_reconstruction_and_orthonormality():
    rng = np.random.RandomState(3)
    for _ in range(20):
        a = rng.uniform(-1, 1, (7, 7))
        a = (a + a.T) / 2
        s = eigen_sym(a)
        norm = max(1.0, np.linalg.norm(a, "fro"))
        assert np.linalg.norm(s.reconstruct() - a, "fro") <= 1e-8 * norm
        v = s.eigenvectors
        assert np.abs(v.T @ v - np.eye(7)).max() < 1e-10
        for i, lam in enumerate(s.eigenvalues):
            assert np.linalg.norm(a @ v[:, i] - lam * v[:, i]) <= 1e-8 * norm


def test_ldlt_exact_example():
    res = ldlt(SymMat(((F(4), F(2)), (F(2), F(2)))))
    assert isinstance(res, LdltFactorization)
    assert res.diag == [F(4), F(1)]
    assert res.lower[1][0] == F(1, 2)
    assert res.perm == (0, 1)


def test_ldlt_indefinite_witness():
    res = ldlt(SymMat(((F(0), F(1)), (F(1), F(0)))))
    assert isinstance(res, IndefiniteWitness)
    assert res.vector == (F(1), F(-1))
    assert res.value == -2


def test_ldlt_zero_matrix():
    res = ldlt(SymMat.zeros(3))
    assert isinstance(res, LdltFactorization)
    assert res.diag == [F(0)] * 3


def test_ldlt_exact_reconstruction_random_psd():
    rng = random.Random(7)
    for trial in range(10):
        size = rng.randint(2, 5)
        u = [[F(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(size)] for _ in range(size)]
        g = [[sum(u[i][k] * u[j][k] for k in range(size)) for j in range(size)] for i in range(size)]
        a = SymMat(tuple(tuple(row) for row in g))
        res = ldlt(a)
        assert isinstance(res, LdltFactorization)
        assert all(dj >= 0 for dj in res.diag)
        m = len(res.perm)
        for i in range(m):
            for j in range(m):
                rec = sum(res.lower[i][k] * res.diag[k] * res.lower[j][k] for k in range(m))
                assert rec == a[res.perm[i], res.perm[j]]


def test_ldlt_witness_value_negative_random():
    rng = random.Random(8)
    for _ in range(20):
        size = rng.randint(2, 5)
        rows = [[F(rng.randint(-4, 4), rng.randint(1, 2)) for _ in range(size)] for _ in range(size)]
        sym = [[(rows[i][j] + rows[j][i]) / 2 for j in range(size)] for i in range(size)]
        a = SymMat(tuple(tuple(row) for row in sym))
        res = ldlt(a)
        if isinstance(res, IndefiniteWitness):
            w = res.vector
            val = sum(w[i] * a[i, j] * w[j] for i in range(size) for j in range(size))
            assert val == res.value < 0


def test_principal_minors():
    assert principal_minors_nonneg(SymMat(((F(1), F(0)), (F(0), F(0)))))
    assert not principal_minors_nonneg(SymMat(((F(1), F(2)), (F(2), F(1)))))
    assert principal_minors_nonneg(SymMat(((F(2), F(-1)), (F(-1), F(2)))))
    with pytest.raises(ValueError):
        principal_minors_nonneg(SymMat.zeros(9))


def test_quadric_matrices_are_indefinite():
    basis = ordered_basis(2, 3)
    for j in (1, 2, 4):
        q = quadric_step(basis, j)
        v = is_psd(q.matrix)
        assert not v.is_psd
        assert not is_psd_exact(q.matrix)


def test_is_psd_constructions():
    rng = np.random.RandomState(0)
    u = rng.randn(4, 4)
    assert is_psd(u.T @ u).is_psd
    v = rng.randn(6, 3)
    lam = rng.uniform(0, 2, 3)
    a = sum(l * np.outer(v[:, i], v[:, i]) for i, l in enumerate(lam))
    assert is_psd(a).is_psd
    assert not is_psd(np.array([[1.0, 2.0], [2.0, 1.0]])).is_psd


def test_is_psd_modes_and_unknown_mode():
    a = np.diag([1.0, 2.0])
    for mode in ("eigen", "ldlt", "minors", "cross_check"):
        assert is_psd(a, mode).is_psd
    with pytest.raises(ValueError):
        is_psd(a, "nope")


def test_oracle_equivalence_random_families():
    # seeded random symmetric matrices incl. rank-deficient and near-singular;
    # cross_check raises on any decisive disagreement
    for seed in range(300):
        rng = np.random.RandomState(seed)
        kind = seed % 4
        dim = 2 + seed % 5
        if kind == 0:
            a = rng.uniform(-1, 1, (dim, dim))
            a = (a + a.T) / 2
        elif kind == 1:
            u = rng.randn(max(1, dim - 2), dim)
            a = u.T @ u
        elif kind == 2:
            u = rng.randn(dim, dim)
            a = u.T @ u + 1e-12 * np.diag(rng.randn(dim))
        else:
            a = np.diag(np.abs(rng.randn(dim)))
            a[0, 0] = 0.0
        is_psd(a)  # must not raise


def test_psd_project_examples():
    p = psd_project(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.abs(p - np.array([[0.5, 0.5], [0.5, 0.5]])).max() < 1e-12
    p = psd_project(np.diag([1.0, -1.0]))
    assert np.abs(p - np.diag([1.0, 0.0])).max() < 1e-12
    a = np.array([[2.0, -1.0], [-1.0, 2.0]])
    assert np.abs(psd_project(a) - a).max() < 1e-9


def test_psd_project_idempotent_and_optimal():
    rng = np.random.RandomState(5)
    a = rng.uniform(-1, 1, (5, 5))
    a = (a + a.T) / 2
    p = psd_project(a)
    assert np.abs(psd_project(p) - p).max() < 1e-9
    dist = np.linalg.norm(a - p, "fro")
    for _ in range(100):
        u = rng.randn(5, 5)
        q = u.T @ u
        assert dist <= np.linalg.norm(a - q, "fro") + 1e-8


def test_factor_psd():
    u, masses = factor_psd(np.eye(3))
    assert np.abs(u.T @ u - np.eye(3)).max() < 1e-12
    assert sorted(m[0] for m in masses) == [1.0, 1.0, 1.0]
    u, masses = factor_psd(np.array([[1.0, 1.0], [1.0, 1.0]]))
    assert len(masses) == 1
    lam, y = masses[0]
    assert abs(lam - 2.0) < 1e-12
    assert np.abs(np.abs(y) - 1 / np.sqrt(2)).max() < 1e-12
    with pytest.raises(ValueError):
        factor_psd(np.diag([1.0, -1.0]))


def test_factor_roundtrip_random():
    rng = np.random.RandomState(9)
    for _ in range(20):
        u0 = rng.randn(6, 6)
        a = u0.T @ u0
        u, masses = factor_psd(a)
        norm = max(1.0, np.linalg.norm(a, "fro"))
        assert np.linalg.norm(u.T @ u - a, "fro") <= 1e-8 * norm
        rebuilt = sum(l * np.outer(y, y) for l, y in masses)
        assert np.linalg.norm(rebuilt - a, "fro") <= 1e-8 * norm


def test_factor_reconstructs_basis_sos():
    from psdlab.forms import basis_sos
    from psdlab.gram import canonical_gram, gram_apply

    basis = ordered_basis(2, 2)
    a = canonical_gram(basis_sos(2, 2), basis)
    u, _ = factor_psd(a.to_numpy())
    rebuilt = SymMat.from_numpy(u.T @ u, 10**6)
    f = gram_apply(rebuilt, basis)
    target = basis_sos(2, 2)
    for alpha in set(f.coeffs) | set(target.coeffs):
        assert abs(float(f.coefficient(alpha) - target.coefficient(alpha))) < 1e-5
