"""Quadrature on S^{n-1} for the normalized Haar measure of K = SO(n).

Integrals over K of right-M-invariant functions reduce to integrals over
K/M = S^{n-1} through the section b -> section(b).  Two product rules are
provided:

* :func:`build`: Gauss rules in the cosines of the polar angles (with the
  exact sin^m weights) times an offset trapezoid rule in the azimuth;
  exact for polynomials up to the declared degree.
* :func:`build_focused`: the same inner rule on S^{n-2}, but composite
  Gauss-Legendre panels in the first polar angle, graded geometrically
  toward the pole e_1.  Suited to Poisson-kernel integrands that
  concentrate at one boundary point.

Sums are reduced by a fixed pairwise tree so results are bit-reproducible.
"""
from dataclasses import dataclass, field
from math import pi

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .errors import ContractError, DomainError
from .lorentz import embed_M_in_K, random_rotation, section_batch

MIN_N, MAX_N = 2, 6
M_INVARIANCE_TOL = 1e-8


@dataclass(frozen=True)
class SphereQuadrature:
    """Nodes on S^{n-1} with positive weights summing to 1."""

    n: int
    nodes: np.ndarray
    weights: np.ndarray
    degree: int
    level: int
    kind: str = "product"
    _sections: dict = field(default_factory=dict, repr=False, compare=False)

    def __len__(self):
        return self.weights.shape[0]

    def sections(self):
        """section(b) for every node, cached."""
        if "k" not in self._sections:
            self._sections["k"] = section_batch(self.nodes)
        return self._sections["k"]


def _check_n(n):
    if not MIN_N <= n <= MAX_N:
        raise DomainError(f"sphere quadrature supports 2 <= n <= 6, got n={n}")


def _azimuth(M):
    phi = (np.arange(M) + 0.5) * (2.0 * pi / M)
    return np.stack([np.cos(phi), np.sin(phi)], axis=1), np.full(M, 1.0 / M)


def _polar_gauss(npts, m):
    """Gauss rule for cos(theta) with weight sin^m(theta) on [0, pi], normalized."""
    alpha = 0.5 * (m - 1)
    x, w = roots_jacobi(npts, alpha, alpha)
    return x, w / np.sum(w)


def _extend(inner_nodes, inner_w, x, w):
    """Nodes (x, sqrt(1-x^2) * inner) with product weights."""
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    nodes = np.concatenate(
        [x[:, None, None].repeat(len(inner_w), 1),
         s[:, None, None] * inner_nodes[None, :, :]], axis=2)
    weights = w[:, None] * inner_w[None, :]
    return nodes.reshape(-1, inner_nodes.shape[1] + 1), weights.reshape(-1)


def _product_rule(n, polar_pts, azimuth_pts, first_pts=None):
    nodes, weights = _azimuth(azimuth_pts)
    # build from S^1 outward; the polar angle of S^{d-1} carries weight sin^{d-2}
    for d in range(3, n + 1):
        npts = first_pts if (d == n and first_pts) else polar_pts
        x, w = _polar_gauss(npts, d - 2)
        nodes, weights = _extend(nodes, weights, x, w)
    return nodes, weights


def build(n, level):
    """Product Gauss / trapezoid rule on S^{n-1}.

    The first polar angle uses 8*level Gauss points, the others 2*level,
    and the azimuth 4*level equispaced points offset by half a step.  The
    rule is exact for polynomials of total degree <= 4*level - 1.
    """
    _check_n(n)
    if int(level) != level or level < 1:
        raise DomainError("quadrature level must be a positive integer")
    level = int(level)
    nodes, weights = _product_rule(n, 2 * level, 4 * level, first_pts=8 * level)
    return SphereQuadrature(n, nodes, weights, 4 * level - 1, level)


def build_custom(n, first_pts, polar_pts, azimuth_pts):
    """Product rule with explicit point counts (first polar angle, other polar angles, azimuth)."""
    _check_n(n)
    nodes, weights = _product_rule(n, polar_pts, azimuth_pts, first_pts=first_pts)
    degree = min(2 * polar_pts - 1 if n > 3 else 2 * first_pts - 1, azimuth_pts - 1)
    return SphereQuadrature(n, nodes, weights, degree, 0, kind="custom")


def build_focused(n, level, smallest=1e-7, ratio=0.5, inner_level=None):
    """Rule graded toward e_1 for integrands concentrating near the pole.

    The first polar angle theta in [0, pi] is split at pi * ratio^j down to
    `smallest`; each panel gets 2*level + 4 Gauss-Legendre points in theta
    with the weight sin^{n-2}(theta).  The remaining coordinates use the
    product rule of S^{n-2} at `inner_level` (default: level).
    """
    _check_n(n)
    if level < 1:
        raise DomainError("quadrature level must be a positive integer")
    inner_level = level if inner_level is None else inner_level
    edges = [pi]
    while edges[-1] * ratio > smallest:
        edges.append(edges[-1] * ratio)
    edges.append(0.0)
    edges = np.array(edges[::-1])
    g, gw = roots_legendre(2 * level + 4)
    lo, hi = edges[:-1, None], edges[1:, None]
    theta = (0.5 * (hi - lo) * g[None, :] + 0.5 * (hi + lo)).reshape(-1)
    wt = (0.5 * (hi - lo) * gw[None, :]).reshape(-1) * np.sin(theta) ** (n - 2)
    # normalize by the discrete mass: low levels under-resolve sin^{n-2} for n >= 5
    wt = wt / pairwise_sum(wt)
    if n == 2:
        # S^1: theta covers [0, pi]; mirror to the lower half circle
        nodes = np.concatenate([np.stack([np.cos(theta), np.sin(theta)], 1),
                                np.stack([np.cos(theta), -np.sin(theta)], 1)])
        weights = np.concatenate([wt, wt]) / 2.0
    else:
        inner_nodes, inner_w = _product_rule(n - 1, 2 * inner_level, 4 * inner_level)
        nodes, weights = _extend(inner_nodes, inner_w, np.cos(theta), wt)
        # use the accurate sine instead of sqrt(1 - cos^2) near the pole
        nodes[:, 1:] = np.repeat(np.sin(theta), len(inner_w))[:, None] * np.tile(
            inner_nodes, (len(theta), 1))
    return SphereQuadrature(n, nodes, weights, 4 * min(level, inner_level) - 1, level,
                            kind="focused")


# ----------------------------------------------------------- reduction

def pairwise_sum(values):
    """Sum along axis 0 with a fixed balanced binary tree."""
    v = np.asarray(values)
    if v.shape[0] == 0:
        return np.zeros(v.shape[1:], dtype=v.dtype)
    while v.shape[0] > 1:
        if v.shape[0] % 2:
            v = np.concatenate([v, np.zeros((1,) + v.shape[1:], dtype=v.dtype)])
        v = v[0::2] + v[1::2]
    return v[0]


def integrate_values(quad, values):
    """sum_i w_i values[i] for values of shape (N, ...)."""
    values = np.asarray(values)
    w = quad.weights.reshape((-1,) + (1,) * (values.ndim - 1))
    return pairwise_sum(w * values)


def integrate(quad, f, vectorized=False):
    """Integrate f over the sphere; f maps a node (or all nodes) to values."""
    if vectorized:
        vals = f(quad.nodes)
    else:
        vals = np.array([np.asarray(f(b)) for b in quad.nodes])
    return integrate_values(quad, vals)


def integrate_over_K(quad, F, right_M_invariant=True, debug=False, frame=None,
                     vectorized=True, rng=None):
    """Integrate a right-M-invariant function F over K with respect to dk.

    F receives an array of rotations (N, n, n) when vectorized, otherwise
    one rotation at a time.  `frame` is an optional rotation R; nodes are
    then R section(b_i), which leaves the integral unchanged by left
    invariance of dk and moves the focus of the rule to R e_1.
    """
    if not right_M_invariant:
        raise ContractError("integrate_over_K requires a right-M-invariant integrand")
    ks = quad.sections()
    if frame is not None:
        ks = np.asarray(frame) @ ks
    call = F if vectorized else (lambda kk: np.array([np.asarray(F(k)) for k in kk]))
    vals = np.asarray(call(ks))
    if debug:
        check_M_invariance(quad, call, ks, vals, rng)
    return integrate_values(quad, vals)


def check_M_invariance(quad, call, ks, vals, rng=None, samples=4):
    """Compare F(k) with F(k m) for random m at a few nodes."""
    rng = np.random.default_rng(0) if rng is None else rng
    n = quad.n
    idx = rng.choice(len(quad), size=min(samples, len(quad)), replace=False)
    ms = np.array([random_rotation(n - 1, rng) for _ in idx])
    shifted = np.asarray(call(ks[idx] @ embed_M_in_K(ms)))
    ref = vals[idx]
    scale = max(1.0, float(np.max(np.abs(ref))))
    err = float(np.max(np.abs(shifted - ref))) / scale
    if err > M_INVARIANCE_TOL:
        raise ContractError(f"integrand is not right-M-invariant (defect {err:.2e})")
    return err
