"""Eisenstein integrals Phi_q^p(lambda, a_t) and their scalar components.

    Phi_q^p(lambda, a_t) = c_{p,q}^2 int_K e^{-(mu+rho)H(a_t^{-1}k)} tau_p(kappa(a_t^{-1}k))
                                          iota pi tau_p(k^{-1}) dk

is tau_p-radial, hence block-scalar on Lambda^p C^n = Lambda^{p-1} C^{n-1} (+) Lambda^p C^{n-1}.
The two scalars have closed forms in Jacobi functions.
"""
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import DomainError, NonRadialError
from .exterior import block_projector, c_pq, dim, embed_matrix, project_matrix, tau_matrix
from .lorentz import geodesic
from .poisson import _embed_K_batch, default_field_quadrature, gamma_lambda, kernel_from_products
from .cfun import c_component, c_matrix
from .specfun import jacobi_phi
from .sphquad import integrate_values

SCHUR_TOL = 1e-6


def eisenstein_quad(params, t, quad=None):
    """Quadrature evaluation of Phi_q^p(lambda, a_t) as a C(n,p) x C(n,p) matrix."""
    n, p, q = params.n, params.p, params.q
    quad = default_field_quadrature(n) if quad is None else quad
    s = quad.sections()
    A = geodesic(-t, n) @ _embed_K_batch(s)
    Km = kernel_from_products(A, params)
    ip = embed_matrix(n, p, q) @ project_matrix(n, p, q)
    right = ip @ np.swapaxes(tau_matrix(s, p), -1, -2)
    terms = Km @ right
    return c_pq(n, p, q) ** 2 * integrate_values(quad, terms)


@dataclass(frozen=True)
class ScalarComponents:
    """Scalars on the Lambda^{p-1} and Lambda^p blocks, with the Schur residual."""

    f_qminus: complex
    f_q: complex
    residual: float = 0.0

    def as_tuple(self):
        return (self.f_qminus, self.f_q)


def reconstruct(comp, n, p):
    out = comp.f_q * block_projector(n, p, p).astype(complex)
    if p >= 1:
        out = out + comp.f_qminus * block_projector(n, p, p - 1)
    return out


def scalar_components(E, n, p, tol=SCHUR_TOL):
    """Block traces of E and the residual of the block-scalar reconstruction.

    The residual is measured relative to max(1, ||E||); exceeding `tol`
    raises NonRadialError.
    """
    E = np.asarray(E)
    if E.shape != (dim(n, p), dim(n, p)):
        raise DomainError("endomorphism has the wrong size")
    vals = []
    for q in (p - 1, p):
        if q < 0:
            vals.append(0j)
            continue
        block = project_matrix(n, p, q) @ E @ embed_matrix(n, p, q)
        vals.append(complex(np.trace(block) / dim(n - 1, q)))
    comp = ScalarComponents(vals[0], vals[1])
    res = float(np.linalg.norm(E - reconstruct(comp, n, p)))
    res /= max(1.0, float(np.linalg.norm(E)))
    comp = ScalarComponents(vals[0], vals[1], res)
    if res > tol:
        raise NonRadialError(f"endomorphism is not block-scalar (residual {res:.2e})")
    return comp


def eisenstein_closed(params, t):
    """Closed-form scalar components of Phi_q^p(lambda, a_t) via Jacobi functions."""
    n, p, q = params.n, params.p, params.q
    if q == p - 1 and p < 1:
        raise DomainError("the q = p-1 components need p >= 1")
    lam = params.lam
    phi_hi = jacobi_phi(n / 2.0, -0.5, lam, t)
    phi_lo = jacobi_phi(n / 2.0 - 1.0, -0.5, lam, t)
    ch = np.cosh(t)
    if q == p:
        return ScalarComponents(phi_hi, (n / (n - p)) * phi_lo - (p / (n - p)) * ch * phi_hi)
    return ScalarComponents((n / p) * phi_lo - ((n - p) / p) * ch * phi_hi, phi_hi)


def eisenstein_closed_matrix(params, t):
    return reconstruct(eisenstein_closed(params, t), params.n, params.p)


def eisenstein_limit_matrix(params):
    """lim e^{(rho - mu)t} Phi_q^p(lambda, a_t) = c_{p,q}^2 c(lambda, p) iota pi (Re mu > 0)."""
    n, p, q = params.n, params.p, params.q
    ip = embed_matrix(n, p, q) @ project_matrix(n, p, q)
    return c_pq(n, p, q) ** 2 * c_matrix(params) @ ip


def asymptotic_residual(params, t, quad=None):
    """Operator-norm distance of e^{(rho - mu)t} Phi_q^p(lambda, a_t) from its limit."""
    if params.mu.real <= 0:
        raise DomainError("the limit exists for Re mu > 0")
    E = np.exp((params.rho - params.mu) * t) * eisenstein_quad(params, t, quad)
    return float(np.linalg.norm(E - eisenstein_limit_matrix(params), 2))


@dataclass(frozen=True)
class HSLimitResult:
    t_grid: tuple
    scaled_hs: tuple
    target: float
    deviations: tuple
    sup_scaled_norm: float
    sup_bound: float

    @property
    def final_deviation(self):
        return self.deviations[-1]

    @property
    def decreasing(self):
        return all(b < a for a, b in zip(self.deviations, self.deviations[1:]))

    @property
    def bound_holds(self):
        return self.sup_scaled_norm <= self.sup_bound


def hs_limit_check(params, t_grid, quad=None, bound_grid=None):
    """Hilbert-Schmidt limit for the tau_p K-type.

    With Phi_{lambda,tau_p} = Phi_q^p / c_{p,q}:
      e^{2(rho - Re mu)t} ||Phi_{lambda,tau_p}(a_t)||_HS^2 -> c_{p,q}^2 |c_q|^2 C(n-1,q),
      sup_t e^{(rho - Re mu)t} ||Phi_{lambda,tau_p}(a_t)||_HS <= gamma_lambda c_{p,q} sqrt(C(n-1,q)).
    """
    if params.mu.real <= 0:
        raise DomainError("HS limit needs Re mu > 0")
    n, p, q = params.n, params.p, params.q
    quad = default_field_quadrature(n) if quad is None else quad
    cpq = c_pq(n, p, q)
    rate = params.rho - params.mu.real
    target = cpq ** 2 * abs(c_component(params)) ** 2 * comb(n - 1, q)

    def scaled_norm(t):
        Phi = eisenstein_quad(params, t, quad) / cpq
        return np.exp(rate * t) * np.linalg.norm(Phi)

    scaled = tuple(scaled_norm(t) ** 2 for t in t_grid)
    devs = tuple(abs(v - target) for v in scaled)
    bgrid = t_grid if bound_grid is None else bound_grid
    sup_norm = max(scaled_norm(t) for t in bgrid)
    bound = gamma_lambda(params, bgrid) * cpq * np.sqrt(comb(n - 1, q))
    return HSLimitResult(tuple(t_grid), scaled, target, devs, sup_norm, bound)
