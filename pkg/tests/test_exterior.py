from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypoisson.errors import DomainError
from hypoisson.exterior import (PForm, basis_form, block_projector, c_pq, dim, embed,
                                embed_matrix, exterior_mul, hodge_star, inner, interior,
                                project, project_matrix, rank, sigma_matrix, subsets, tau_apply,
                                tau_matrix, unrank, wedge_vectors, zero_form)
from hypoisson.lorentz import random_rotation


def rand_form(rng, n, p):
    d = dim(n, p)
    return PForm(n, p, rng.standard_normal(d) + 1j * rng.standard_normal(d))


def test_rank_examples():
    assert rank((1, 2), 4) == 0
    assert rank((3, 4), 4) == 5
    assert unrank(0, 4, 2) == (1, 2)


@pytest.mark.parametrize("n,p", [(3, 1), (4, 2), (5, 3), (6, 2)])
def test_rank_unrank_bijection(n, p):
    for r in range(comb(n, p)):
        assert rank(unrank(r, n, p), n) == r
    assert list(subsets(n, p)) == sorted(subsets(n, p))


@pytest.mark.parametrize("bad", [(2, 1), (0, 2), (1, 5), (2, 2)])
def test_rank_rejects_invalid(bad):
    with pytest.raises(DomainError):
        rank(bad, 4)


def test_unrank_out_of_range():
    with pytest.raises(DomainError):
        unrank(6, 4, 2)


def test_inner_examples():
    e12 = basis_form(4, (1, 2))
    assert inner(e12, e12) == 1
    assert inner(e12, basis_form(4, (1, 3))) == 0
    w = wedge_vectors([[1, 0, 1, 0], [0, 1, 0, 0]], 4)
    assert abs(inner(e12, w) - 1) < 1e-15


def test_inner_gram_determinant():
    rng = np.random.default_rng(0)
    V = rng.standard_normal((2, 4))
    W = rng.standard_normal((2, 4))
    gram = np.linalg.det(V @ W.T)
    assert abs(inner(wedge_vectors(V, 4), wedge_vectors(W, 4)) - gram) < 1e-12


def test_inner_mismatch():
    with pytest.raises(DomainError):
        inner(basis_form(4, (1,)), basis_form(4, (1, 2)))


def test_interior_examples():
    out = interior(np.eye(3)[1], basis_form(3, (1, 2)))
    np.testing.assert_allclose(out.coeffs, -basis_form(3, (1,)).coeffs)
    assert interior(np.eye(3)[2], basis_form(3, (1, 2))).norm() == 0
    out = interior(np.eye(3)[0], basis_form(3, (1, 2, 3)))
    np.testing.assert_allclose(out.coeffs, basis_form(3, (2, 3)).coeffs)
    with pytest.raises(DomainError):
        interior(np.eye(3)[0], zero_form(3, 0))


def test_exterior_examples():
    out = exterior_mul(np.eye(3)[0], basis_form(3, (2,)))
    np.testing.assert_allclose(out.coeffs, basis_form(3, (1, 2)).coeffs)
    assert exterior_mul(np.eye(3)[0], basis_form(3, (1, 2))).norm() == 0
    with pytest.raises(DomainError):
        exterior_mul(np.eye(3)[0], basis_form(3, (1, 2, 3)))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10 ** 6))
def test_interior_exterior_adjoint(n, seed):
    rng = np.random.default_rng(seed)
    p = int(rng.integers(1, n + 1))
    v = rng.standard_normal(n)
    omega, xi = rand_form(rng, n, p), rand_form(rng, n, p - 1)
    assert abs(inner(interior(v, omega), xi) - inner(omega, exterior_mul(v, xi))) < 1e-12


def test_hodge_examples():
    np.testing.assert_allclose(hodge_star(basis_form(3, (1, 2))).coeffs, basis_form(3, (3,)).coeffs)
    one = PForm(2, 0, [1.0])
    np.testing.assert_allclose(hodge_star(one).coeffs, basis_form(2, (1, 2)).coeffs)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_hodge_double(n):
    rng = np.random.default_rng(n)
    for p in range(n + 1):
        w = rand_form(rng, n, p)
        np.testing.assert_allclose(hodge_star(hodge_star(w)).coeffs,
                                   (-1) ** (p * (n - p)) * w.coeffs, atol=1e-14)


def test_tau_examples():
    rng = np.random.default_rng(1)
    w = rand_form(rng, 4, 2)
    np.testing.assert_allclose(tau_apply(np.eye(4), w).coeffs, w.coeffs)
    R = np.eye(3)
    R[:2, :2] = [[0, -1], [1, 0]]
    np.testing.assert_allclose(tau_apply(R, basis_form(3, (1, 2))).coeffs,
                               basis_form(3, (1, 2)).coeffs, atol=1e-15)
    with pytest.raises(DomainError):
        tau_apply(np.diag([1.0, 2.0, 1.0]), basis_form(3, (1,)))


def test_tau_on_decomposables():
    rng = np.random.default_rng(2)
    k = random_rotation(5, rng)
    V = rng.standard_normal((3, 5))
    lhs = tau_apply(k, wedge_vectors(V, 5))
    rhs = wedge_vectors((k @ V.T).T, 5)
    np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10 ** 6))
def test_tau_unitary_and_homomorphism(n, seed):
    rng = np.random.default_rng(seed)
    p = int(rng.integers(0, n + 1))
    k1, k2 = random_rotation(n, rng), random_rotation(n, rng)
    w, x = rand_form(rng, n, p), rand_form(rng, n, p)
    assert abs(inner(tau_apply(k1, w), tau_apply(k1, x)) - inner(w, x)) < 1e-10
    lhs = tau_apply(k1 @ k2, w).coeffs
    rhs = tau_apply(k1, tau_apply(k2, w)).coeffs
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_tau_matrix_batched_matches_single():
    rng = np.random.default_rng(3)
    ks = np.array([random_rotation(5, rng) for _ in range(4)])
    for p in range(6):
        batch = tau_matrix(ks, p)
        for i in range(4):
            np.testing.assert_allclose(batch[i], tau_matrix(ks[i], p), atol=1e-13)


def test_embed_examples():
    e1 = embed(0, PForm(3, 0, [1.0]), 1)
    np.testing.assert_allclose(e1.coeffs, basis_form(4, (1,)).coeffs)
    # e_2 of C^{n-1} is the first basis vector of span{e_2,...,e_n}
    e2 = embed(1, basis_form(3, (1,)), 1)
    np.testing.assert_allclose(e2.coeffs, basis_form(4, (2,)).coeffs)
    with pytest.raises(DomainError):
        embed(3, basis_form(3, (1,)), 1)


def test_project_examples():
    assert project(0, basis_form(4, (1,))).coeffs[0] == 1
    assert project(1, basis_form(4, (1,))).norm() == 0
    with pytest.raises(DomainError):
        project(2, basis_form(4, (1,)))


@pytest.mark.parametrize("n,p", [(3, 1), (4, 1), (5, 2), (6, 2), (6, 3)])
def test_decomposition(n, p):
    rng = np.random.default_rng(n + p)
    w = rand_form(rng, n, p)
    a = embed(p - 1, project(p - 1, w), p)
    b = embed(p, project(p, w), p)
    np.testing.assert_allclose((a + b).coeffs, w.coeffs, atol=1e-14)
    assert abs(inner(a, b)) < 1e-14
    for q in (p - 1, p):
        np.testing.assert_array_equal(project_matrix(n, p, q), embed_matrix(n, p, q).T)
        xi = rand_form(rng, n - 1, q)
        assert abs(embed(q, xi, p).norm() - xi.norm()) < 1e-14
        assert abs(inner(project(q, w), xi) - inner(w, embed(q, xi, p))) < 1e-12
    np.testing.assert_allclose(block_projector(n, p, p) + block_projector(n, p, p - 1),
                               np.eye(dim(n, p)))


@pytest.mark.parametrize("n,p", [(4, 1), (5, 2), (6, 2)])
def test_m_equivariance(n, p):
    rng = np.random.default_rng(7)
    m = random_rotation(n - 1, rng)
    mk = np.eye(n)
    mk[1:, 1:] = m
    for q in (p - 1, p):
        xi = rand_form(rng, n - 1, q)
        lhs = tau_apply(mk, embed(q, xi, p)).coeffs
        rhs = embed(q, PForm(n - 1, q, sigma_matrix(m, q) @ xi.coeffs), p).coeffs
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_dimension_identities(n):
    for p in range(1, n):
        assert comb(n, p) == comb(n - 1, p - 1) + comb(n - 1, p)
        assert abs(c_pq(n, p, p) ** 2 - n / (n - p)) < 1e-14
        assert abs(c_pq(n, p, p - 1) ** 2 - n / p) < 1e-14
