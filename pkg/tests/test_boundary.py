import numpy as np
import pytest

from hypoisson.boundary import (ambient_test_form, constant_fiber_form, eval_on_K, eval_on_K_batch,
                                kfinite_test_form, lr_norm, random_test_form, zero_boundary_form)
from hypoisson.eisenstein import eisenstein_closed_matrix
from hypoisson.errors import DomainError
from hypoisson.exterior import c_pq, dim, sigma_matrix
from hypoisson.lorentz import embed_M_in_K, geodesic, random_rotation
from hypoisson.poisson import PoissonField
from hypoisson.specfun import SpectralParams
from hypoisson.sphquad import build


@pytest.mark.parametrize("q", [0, 1, 2])
def test_covariance(q):
    n = 4
    rng = np.random.default_rng(q)
    f = random_test_form(n, 2, q, rng) if q >= 1 else random_test_form(n, 1, q, rng)
    ks = np.array([random_rotation(n, rng) for _ in range(1000)])
    ms = np.array([random_rotation(n - 1, rng) for _ in range(1000)])
    lhs = eval_on_K_batch(f, ks @ embed_M_in_K(ms))
    sig = sigma_matrix(np.swapaxes(ms, 1, 2), q)
    rhs = np.einsum("nij,nj->ni", sig, eval_on_K_batch(f, ks))
    scale = np.max(np.abs(rhs))
    assert np.max(np.abs(lhs - rhs)) < 1e-11 * scale


def test_constant_fiber_and_scalar():
    n = 4
    xi = np.array([1.0, 2.0, -1.0])
    f = constant_fiber_form(n, 1, xi)
    np.testing.assert_allclose(eval_on_K(f, np.eye(n)), xi)
    rng = np.random.default_rng(1)
    k = random_rotation(n, rng)
    assert abs(np.linalg.norm(eval_on_K(f, k)) - np.linalg.norm(xi)) < 1e-13
    g = constant_fiber_form(n, 0, [2.0])
    # q = 0: no dependence on the M-part
    m = embed_M_in_K(random_rotation(n - 1, rng))
    assert eval_on_K(g, k) == eval_on_K(g, k @ m)
    with pytest.raises(DomainError):
        constant_fiber_form(n, 1, [1.0, 2.0])


def test_zero_form():
    f = zero_boundary_form(5, 2)
    assert f.fiber(np.eye(5)).shape == (5, dim(4, 2))
    assert lr_norm(f, 2, build(5, 1)) == 0


def test_ambient_norm():
    # f(k) = pi(tau(k^{-1}) e_2): ||f(k)||^2 = 1 - b_2^2, mean 3/4 on S^3
    n = 4
    e2 = np.eye(n)[1]
    f = ambient_test_form(e2, n, 1)
    assert abs(lr_norm(f, 2, build(n, 2)) ** 2 - 0.75) < 1e-13
    with pytest.raises(DomainError):
        ambient_test_form(np.ones(3), n, 1)


def test_lr_norm_homogeneous():
    rng = np.random.default_rng(2)
    f = random_test_form(4, 1, 1, rng)
    quad = build(4, 2)
    for r in (1.5, 2.0, 4.0):
        assert abs(lr_norm(f.scale(-3j), r, quad) - 3 * lr_norm(f, r, quad)) < 1e-11
    with pytest.raises(DomainError):
        lr_norm(f, 1.0, quad)


def test_lr_norm_monotone_in_r():
    f = random_test_form(4, 1, 0, np.random.default_rng(3))
    quad = build(4, 2)
    vals = [lr_norm(f, r, quad) for r in (1.5, 2, 4, 8)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("q", [0, 1])
def test_kfinite_transform_is_eisenstein(q):
    # P(c_{p,q} kfinite(w))(a_t) = Phi(a_t) w, the Eisenstein integral applied to w
    n, p = 4, 1
    params = SpectralParams(n, p, q, {1: 1.5, 0: 2.0}[q])
    rng = np.random.default_rng(4)
    w = rng.standard_normal(dim(n, p)) + 1j * rng.standard_normal(dim(n, p))
    f = kfinite_test_form(w, n, p, q).scale(c_pq(n, p, q))
    field = PoissonField(params, f)
    val = field.at(geodesic(1.0, n))
    ref = eisenstein_closed_matrix(params, 1.0) @ w
    assert np.max(np.abs(val - ref)) < 1e-7 * np.max(np.abs(ref))
