import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypoisson.cfun import nbar_normalizer
from hypoisson.errors import DomainError
from hypoisson.lorentz import (H_of, ball_action, check_group_element, embed_K, embed_M,
                               geodesic, inverse, iwasawa, iwasawa_batch, kappa_of,
                               lorentz_metric, m_part, n_of, nbar_of, random_group_element,
                               random_rotation, section, section_batch)


def test_geodesic_examples():
    np.testing.assert_array_equal(geodesic(0.0, 3), np.eye(4))
    np.testing.assert_allclose(geodesic(0.7, 3) @ geodesic(-0.7, 3), np.eye(4), atol=1e-15)
    assert abs(geodesic(1.0, 3)[0, 0] - 1.5430806348) < 1e-10
    np.testing.assert_allclose(geodesic(0.3, 4) @ geodesic(0.5, 4), geodesic(0.8, 4), atol=1e-14)


def test_n_examples():
    np.testing.assert_array_equal(n_of(np.zeros(3)), np.eye(5))
    y = 0.7
    expected = np.array([[1 - y * y / 2, y, -y * y / 2],
                         [-y, 1, -y],
                         [y * y / 2, -y, 1 + y * y / 2]])
    np.testing.assert_allclose(nbar_of([y]), expected, atol=1e-15)


def test_n_abelian():
    rng = np.random.default_rng(0)
    y1, y2 = rng.standard_normal(3), rng.standard_normal(3)
    np.testing.assert_allclose(n_of(y1) @ n_of(y2), n_of(y1 + y2), atol=1e-13)


def test_group_elements_are_lorentz():
    rng = np.random.default_rng(1)
    for n in (2, 3, 4, 5):
        J = lorentz_metric(n)
        for g in (n_of(rng.standard_normal(n - 1)), nbar_of(rng.standard_normal(n - 1)),
                  random_group_element(n, rng)):
            check_group_element(g)
            np.testing.assert_allclose(g.T @ J @ g, J, atol=1e-9 * np.max(np.abs(g)) ** 2)
            np.testing.assert_allclose(inverse(g) @ g, np.eye(n + 1), atol=1e-9 * np.max(np.abs(g)) ** 2)


def test_check_group_element_rejects():
    with pytest.raises(DomainError):
        check_group_element(np.diag([2.0, 1.0, 1.0]))
    with pytest.raises(DomainError):
        check_group_element(-np.eye(3))


def test_embed_examples():
    rng = np.random.default_rng(2)
    np.testing.assert_array_equal(embed_K(np.eye(3)), np.eye(4))
    m = random_rotation(3, rng)
    M = embed_M(m)
    np.testing.assert_allclose(M @ geodesic(0.9, 4), geodesic(0.9, 4) @ M, atol=1e-14)
    y = rng.standard_normal(3)
    np.testing.assert_allclose(M @ n_of(y) @ inverse(M), n_of(m @ y), atol=1e-13)
    with pytest.raises(DomainError):
        embed_K(np.diag([1.0, 2.0, 1.0]))
    with pytest.raises(DomainError):
        embed_M(np.diag([-1.0, 1.0]))


def test_iwasawa_examples():
    rng = np.random.default_rng(3)
    f = iwasawa(geodesic(1.3, 4))
    np.testing.assert_allclose(f.k, np.eye(4), atol=1e-15)
    assert abs(f.t - 1.3) < 1e-14 and np.max(np.abs(f.y)) < 1e-15
    k = random_rotation(4, rng)
    f = iwasawa(embed_K(k))
    np.testing.assert_allclose(f.k, k, atol=1e-15)
    assert abs(f.t) < 1e-15 and np.max(np.abs(f.y)) < 1e-15
    y = 0.8
    assert abs(H_of(nbar_of([y])) - np.log(1 + y * y)) < 1e-14


def test_H_and_kappa():
    rng = np.random.default_rng(4)
    assert abs(H_of(geodesic(-0.4, 3)) + 0.4) < 1e-14
    k = random_rotation(3, rng)
    np.testing.assert_allclose(kappa_of(embed_K(k) @ n_of(rng.standard_normal(2))), k, atol=1e-13)
    for _ in range(10):
        g = random_group_element(4, rng)
        m = random_rotation(3, rng)
        y = rng.standard_normal(3)
        assert abs(H_of(g @ embed_M(m) @ n_of(y)) - H_of(g)) < 1e-10
        s = rng.uniform(-1, 1)
        assert abs(H_of(g @ geodesic(s, 4)) - H_of(g) - s) < 1e-10
        h = random_rotation(4, rng)
        assert abs(H_of(embed_K(h) @ g) - H_of(g)) < 1e-10


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10 ** 6))
def test_iwasawa_reassembly(n, seed):
    rng = np.random.default_rng(seed)
    g = random_group_element(n, rng)
    f = iwasawa(g)
    np.testing.assert_allclose(f.reassemble(), g, atol=1e-9 * np.max(np.abs(g)))
    np.testing.assert_allclose(f.k.T @ f.k, np.eye(n), atol=1e-9)
    assert abs(np.linalg.det(f.k) - 1) < 1e-9


def test_iwasawa_batch_matches_single():
    rng = np.random.default_rng(5)
    gs = np.array([random_group_element(4, rng) for _ in range(6)])
    k, t, y = iwasawa_batch(gs)
    for i in range(6):
        f = iwasawa(gs[i])
        np.testing.assert_allclose(k[i], f.k)
        assert t[i] == f.t
        np.testing.assert_allclose(y[i], f.y)


def test_iwasawa_rejects():
    with pytest.raises(DomainError):
        iwasawa(np.diag([2.0, 1.0, 1.0]))


def test_section_examples():
    np.testing.assert_allclose(section(np.array([1.0, 0, 0])), np.eye(3), atol=1e-15)
    R = section(np.array([0.0, 1.0, 0.0]))
    np.testing.assert_allclose(R, [[0, -1, 0], [1, 0, 0], [0, 0, 1]], atol=1e-15)
    np.testing.assert_array_equal(section(np.array([-1.0, 0, 0, 0])), np.diag([-1.0, -1, 1, 1]))
    rng = np.random.default_rng(6)
    b = rng.standard_normal((20, 5))
    b /= np.linalg.norm(b, axis=1, keepdims=True)
    k = section_batch(b)
    np.testing.assert_allclose(k[:, :, 0], b, atol=1e-14)
    np.testing.assert_allclose(k @ np.swapaxes(k, 1, 2), np.broadcast_to(np.eye(5), k.shape), atol=1e-13)
    assert np.all(np.abs(np.linalg.det(k) - 1) < 1e-12)
    with pytest.raises(DomainError):
        section(np.array([1.0, 1.0, 0.0]))


def test_m_part():
    rng = np.random.default_rng(7)
    b = rng.standard_normal(4)
    b /= np.linalg.norm(b)
    bb, m = m_part(section(b))
    np.testing.assert_allclose(bb, b)
    np.testing.assert_allclose(m, np.eye(3), atol=1e-14)
    mm = random_rotation(3, rng)
    bb, m = m_part(embed_K(np.eye(4))[:4, :4] @ np.block([[np.eye(1), np.zeros((1, 3))],
                                                         [np.zeros((3, 1)), mm]]))
    np.testing.assert_allclose(bb, np.eye(4)[0], atol=1e-15)
    np.testing.assert_allclose(m, mm, atol=1e-14)
    k = random_rotation(4, rng)
    bb, m = m_part(k)
    rebuilt = section(bb) @ np.block([[np.eye(1), np.zeros((1, 3))], [np.zeros((3, 1)), m]])
    np.testing.assert_allclose(rebuilt, k, atol=1e-9)


def test_ball_action():
    rng = np.random.default_rng(8)
    # the hyperboloid lift carries half the hyperbolic distance: a_t . 0 = tanh(t/2) e_1
    t = 0.9
    np.testing.assert_allclose(ball_action(geodesic(t, 3), np.zeros(3)),
                               [np.tanh(t / 2), 0, 0], atol=1e-15)
    k = random_rotation(3, rng)
    x = np.array([0.1, -0.3, 0.2])
    np.testing.assert_allclose(ball_action(embed_K(k), x), k @ x, atol=1e-15)
    g1, g2 = random_group_element(3, rng, 1.0, 0.5), random_group_element(3, rng, 1.0, 0.5)
    np.testing.assert_allclose(ball_action(g1, ball_action(inverse(g1), x)), x, atol=1e-12)
    np.testing.assert_allclose(ball_action(g1, ball_action(g2, x)), ball_action(g1 @ g2, x),
                               atol=1e-12)
    with pytest.raises(DomainError):
        ball_action(g1, np.array([1.0, 0, 0]))


def test_nbar_normalizer_n2():
    assert abs(nbar_normalizer(2) - np.pi) < 1e-6
