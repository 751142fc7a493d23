import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypoisson.acceptance import sphere_moment
from hypoisson.errors import ContractError, DomainError
from hypoisson.exterior import embed_matrix, project_matrix, tau_matrix
from hypoisson.lorentz import embed_K, geodesic, iwasawa_batch, random_rotation
from hypoisson.sphquad import (build, build_custom, build_focused, integrate, integrate_over_K,
                               integrate_values, pairwise_sum)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_weights_normalized(n):
    for quad in (build(n, 2), build_focused(n, 1, smallest=1e-4)):
        assert np.all(quad.weights > 0)
        assert abs(quad.weights.sum() - 1) < 1e-13
        np.testing.assert_allclose(np.linalg.norm(quad.nodes, axis=1), 1, atol=1e-14)


def test_second_moments():
    quad = build(4, 2)
    b = quad.nodes
    assert abs(integrate_values(quad, b[:, 0] ** 2) - 0.25) < 1e-14
    assert abs(integrate_values(quad, b[:, 0] * b[:, 1])) < 1e-15


@pytest.mark.parametrize("n,level", [(2, 1), (3, 1), (3, 2), (4, 1), (5, 1)])
def test_exact_up_to_declared_degree(n, level):
    quad = build(n, level)
    for a in itertools.product(range(quad.degree + 1), repeat=n):
        if sum(a) > quad.degree:
            continue
        vals = np.prod(quad.nodes ** np.array(a), axis=1)
        assert abs(integrate_values(quad, vals) - sphere_moment(a)) < 1e-13


def test_harmonic_integrates_to_zero():
    quad = build(5, 1)
    b = quad.nodes
    # degree-2 harmonic polynomial
    h = b[:, 0] ** 2 - b[:, 3] ** 2 + 3 * b[:, 1] * b[:, 2]
    assert abs(integrate_values(quad, h)) < 1e-15


def _mass(quad, t, n=4):
    rho = 0.5 * (n - 1)
    A = geodesic(-t, n) @ np.array([embed_K(k) for k in quad.sections()])
    _, H, _ = iwasawa_batch(A)
    return float(integrate_values(quad, np.exp(-2 * rho * H)))


def test_poisson_total_mass():
    assert abs(_mass(build(4, 6), 1.0) - 1) < 1e-8
    # the focused rule handles concentrated kernels
    assert abs(_mass(build_focused(4, 3, smallest=1e-6), 5.0) - 1) < 1e-8


def test_convergence_in_level():
    f = lambda b: np.exp(b[:, 0] + 0.5 * b[:, 2])
    ref = integrate(build(4, 8), f, vectorized=True)
    e1 = abs(integrate(build(4, 1), f, vectorized=True) - ref)
    e2 = abs(integrate(build(4, 2), f, vectorized=True) - ref)
    assert e2 < e1 / 100


@pytest.mark.parametrize("n,p", [(3, 1), (4, 1), (4, 2), (5, 2)])
def test_schur_orthogonality(n, p):
    quad = build(n, 2)
    ks = quad.sections()
    for q in (p - 1, p):
        Pi = embed_matrix(n, p, q) @ project_matrix(n, p, q)
        T = tau_matrix(ks, p)
        vals = T @ Pi @ np.swapaxes(T, 1, 2)
        avg = integrate_values(quad, vals)
        np.testing.assert_allclose(avg, comb(n - 1, q) / comb(n, p) * np.eye(comb(n, p)),
                                   atol=1e-13)


def test_integrate_over_K():
    quad = build(4, 2)
    rng = np.random.default_rng(0)
    v = rng.standard_normal(4)
    good = lambda k: np.exp(k[:, :, 0] @ v)
    val = integrate_over_K(quad, good)
    rot = integrate_over_K(quad, good, frame=random_rotation(4, rng))
    assert abs(val - rot) < 1e-6
    assert abs(integrate_over_K(quad, good, debug=True) - val) == 0
    bad = lambda k: k[:, 1, 1]
    with pytest.raises(ContractError):
        integrate_over_K(quad, bad, debug=True)
    with pytest.raises(ContractError):
        integrate_over_K(quad, good, right_M_invariant=False)


def test_no_node_at_antipode():
    for n in (3, 4, 5):
        quad = build(n, 3)
        assert np.min(np.linalg.norm(quad.nodes + np.eye(n)[0], axis=1)) > 1e-3


def test_rejects_bad_arguments():
    with pytest.raises(DomainError):
        build(7, 1)
    with pytest.raises(DomainError):
        build(1, 1)
    with pytest.raises(DomainError):
        build(4, 0)
    with pytest.raises(DomainError):
        build_focused(4, 0)


def test_custom_rule_degree():
    quad = build_custom(4, 4, 2, 4)
    assert len(quad) == 32 and quad.degree == 3
    assert abs(integrate_values(quad, quad.nodes[:, 1] ** 2) - 0.25) < 1e-14


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 200), st.integers(0, 10 ** 6))
def test_pairwise_sum_matches_sum(m, seed):
    x = np.random.default_rng(seed).standard_normal((m, 3))
    np.testing.assert_allclose(pairwise_sum(x), x.sum(axis=0), atol=1e-12)
