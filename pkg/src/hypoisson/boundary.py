"""sigma_q-covariant boundary forms on K/M = S^{n-1}.

A boundary form f: K -> Lambda^q C^{n-1} satisfies f(k m) = sigma_q(m^{-1}) f(k)
for m in M = SO(n-1).  It is stored through its values on the section,
fiber_map(b) = f(section(b)), and extended to all of K by covariance.
"""
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError
from .exterior import dim, project_matrix, sigma_matrix, tau_matrix
from .lorentz import m_part_batch, section_batch
from .sphquad import integrate_values


@dataclass(frozen=True)
class BoundaryForm:
    """Covariant boundary form given by a vectorized fiber map.

    fiber_map takes unit vectors of shape (N, n) and returns values of
    shape (N, C(n-1, q)).
    """

    n: int
    q: int
    fiber_map: Callable

    @property
    def fiber_dim(self):
        return dim(self.n - 1, self.q)

    def fiber(self, b):
        b = np.asarray(b, dtype=float)
        single = b.ndim == 1
        vals = np.asarray(self.fiber_map(np.atleast_2d(b)), dtype=complex)
        vals = vals.reshape(-1, self.fiber_dim)
        return vals[0] if single else vals

    def __add__(self, other):
        if (self.n, self.q) != (other.n, other.q):
            raise DomainError("boundary forms of different type")
        fa, fb = self.fiber_map, other.fiber_map
        return BoundaryForm(self.n, self.q, lambda b: fa(b) + fb(b))

    def scale(self, c):
        fa = self.fiber_map
        return BoundaryForm(self.n, self.q, lambda b: c * np.asarray(fa(b)))

    def times_scalar(self, h):
        """Pointwise product with a scalar function h(b) on the sphere (keeps covariance)."""
        fa = self.fiber_map
        return BoundaryForm(self.n, self.q,
                            lambda b: np.asarray(h(b))[:, None] * np.asarray(fa(b)))


def eval_on_K_batch(f, k):
    """f(k) for rotations of shape (N, n, n): sigma_q(m^{-1}) fiber_map(b)."""
    b, m = m_part_batch(k)
    vals = f.fiber(b)
    if f.q == 0:
        return vals
    sig = sigma_matrix(np.swapaxes(m, -1, -2), f.q)
    return np.einsum("nij,nj->ni", sig, vals)


def eval_on_K(f, k):
    """Value of the covariant form at a single rotation k."""
    k = np.asarray(k, dtype=float)
    if k.shape != (f.n, f.n):
        raise DomainError("rotation has the wrong size")
    return eval_on_K_batch(f, k[None])[0]


def zero_boundary_form(n, q):
    d = dim(n - 1, q)
    return BoundaryForm(n, q, lambda b: np.zeros((len(b), d), dtype=complex))


def constant_fiber_form(n, q, xi):
    """Form whose fiber map is the constant vector xi."""
    xi = np.asarray(xi, dtype=complex).reshape(-1)
    if xi.shape[0] != dim(n - 1, q):
        raise DomainError("wrong fiber dimension")
    return BoundaryForm(n, q, lambda b: np.broadcast_to(xi, (len(b), xi.shape[0])).copy())


def _kinv_apply(b, vec, p):
    """tau_p(section(b)^{-1}) vec for each b."""
    s = section_batch(b)
    T = tau_matrix(np.swapaxes(s, -1, -2), p)
    return np.einsum("nij,j->ni", T, vec)


def ambient_test_form(omega, n, q):
    """f(k) = pi(tau_q(k^{-1}) omega) for omega in Lambda^q C^n.

    pi keeps the components e_I with 1 not in I, i.e. Lambda^q C^{n-1}.
    """
    omega = np.asarray(omega, dtype=complex).reshape(-1)
    if omega.shape[0] != dim(n, q):
        raise DomainError("omega has the wrong length")
    P = project_matrix(n, q, q)
    return BoundaryForm(n, q, lambda b: _kinv_apply(b, omega, q) @ P.T)


def kfinite_test_form(w, n, p, q):
    """f(k) = pi_p^q(tau_p(k^{-1}) w) for w in Lambda^p C^n."""
    w = np.asarray(w, dtype=complex).reshape(-1)
    if w.shape[0] != dim(n, p):
        raise DomainError("w has the wrong length")
    P = project_matrix(n, p, q)
    return BoundaryForm(n, q, lambda b: _kinv_apply(b, w, p) @ P.T)


def lr_norm(f, r, quad):
    """(int_K ||f(k)||^r dk)^{1/r}; the integrand is M-invariant."""
    if not r > 1:
        raise DomainError("L^r norm needs r > 1")
    vals = f.fiber(quad.nodes)
    mags = np.linalg.norm(vals, axis=1) ** r
    return float(np.real(integrate_values(quad, mags))) ** (1.0 / r)


def random_test_form(n, p, q, rng, bump=True):
    """Random smooth covariant form: K-finite pieces times an optional smooth scalar factor.

    Combines an ambient form of type tau_q, a K-finite form of type tau_p,
    and (if bump) multiplies by exp(v . b) with a random v of moderate size.
    """
    cplx = lambda d: rng.standard_normal(d) + 1j * rng.standard_normal(d)
    f = ambient_test_form(cplx(dim(n, q)), n, q) + kfinite_test_form(cplx(dim(n, p)), n, p, q)
    if bump:
        v = rng.standard_normal(n) * 0.5
        f = f.times_scalar(lambda b, v=v: np.exp(b @ v))
    return f
