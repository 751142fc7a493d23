"""Poisson transform of sigma_q-covariant boundary forms to tau_p-covariant fields.

    P f(g) = c_{p,q} int_K e^{-(mu+rho) H(g^{-1} k)} tau_p(kappa(g^{-1} k)) iota f(k) dk

The kernel concentrates at the boundary point b* = direction of g.o with
width ~ e^{-t}; integrals use a rule graded toward e_1 (sphquad.build_focused)
rotated so that its pole sits at b*.  For points g = k a_t the rotated
kernel no longer depends on k, so it is tabulated once per t.
"""
from dataclasses import dataclass, field

import numpy as np

from .boundary import eval_on_K_batch, lr_norm
from .cfun import c_component, c_matrix
from .errors import ContractError, DomainError
from .exterior import PForm, c_pq, dim, embed_matrix, project_matrix, tau_matrix
from .lorentz import (embed_M_in_K, geodesic, inverse, iwasawa_batch, random_rotation,
                      section_batch)
from .specfun import SpectralParams, jacobi_phi
from .sphquad import build_focused, integrate_values, pairwise_sum

DEFAULT_FIELD_LEVEL = 3
HARDY_T_GRID = tuple(np.round(np.arange(0.0, 6.0 + 1e-9, 0.25), 10))


def default_field_quadrature(n, level=DEFAULT_FIELD_LEVEL):
    return build_focused(n, level, smallest=1e-6, ratio=0.5)


def frame_for(b):
    """A rotation R with R e_1 = b, smooth away from b = e_1 and b = -e_1 issues."""
    b = np.asarray(b, dtype=float)
    n = b.shape[-1]
    if b[0] >= 0:
        return section_batch(b)
    flip = np.eye(n)
    flip[0, 0] = flip[1, 1] = -1.0
    return section_batch(-b) @ flip


def _embed_K_batch(k):
    k = np.asarray(k)
    n = k.shape[-1]
    g = np.broadcast_to(np.eye(n + 1), k.shape[:-2] + (n + 1, n + 1)).copy()
    g[..., :n, :n] = k
    return g


def kernel_from_products(A, params):
    """e^{-(mu+rho) H(A)} tau_p(kappa(A)) for group elements A (batched)."""
    k, t, _ = iwasawa_batch(A)
    amp = np.exp(-(params.mu + params.rho) * t)
    return amp[..., None, None] * tau_matrix(k, params.p)


def poisson_kernel(g, k, params):
    """P(g, k) = e^{-(mu+rho)H(g^{-1}k)} tau_p(kappa(g^{-1}k)) as a matrix on Lambda^p C^n."""
    A = inverse(np.asarray(g, dtype=float)) @ _embed_K_batch(np.asarray(k, dtype=float))
    return kernel_from_products(A, params)


def phi_lambda(g, params):
    """Phi_lambda(g) = e^{-(conj(mu) + rho) H(g)} tau_p(kappa(g))^{-1}; Phi_lambda(g^{-1}k)^* = P(g, k)."""
    k, t, _ = iwasawa_batch(np.asarray(g, dtype=float))
    amp = np.exp(-(np.conj(params.mu) + params.rho) * t)
    return amp[..., None, None] * np.swapaxes(tau_matrix(k, params.p), -1, -2)


@dataclass
class PoissonField:
    """The field P f attached to a boundary form f and spectral data."""

    params: SpectralParams
    boundary: object
    quad: object = None
    debug: bool = False
    _kernel_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.boundary.n != self.params.n or self.boundary.q != self.params.q:
            raise DomainError("boundary form does not match (n, q) of the parameters")
        if self.quad is None:
            self.quad = default_field_quadrature(self.params.n)
        n, p, q = self.params.n, self.params.p, self.params.q
        self._iota = c_pq(n, p, q) * embed_matrix(n, p, q)

    @property
    def dim(self):
        return dim(self.params.n, self.params.p)

    # weighted kernel matrices on the rule focused at e_1, for the point a_t
    def orbit_kernel(self, t):
        key = float(t)
        if key not in self._kernel_cache:
            n = self.params.n
            s = self.quad.sections()
            A = geodesic(-t, n) @ _embed_K_batch(s)
            Kt = kernel_from_products(A, self.params) @ self._iota
            self._kernel_cache[key] = Kt * self.quad.weights[:, None, None]
        return self._kernel_cache[key]

    def on_orbit(self, ks, t, chunk=64):
        """Values at the points k a_t for rotations ks of shape (J, n, n)."""
        ks = np.asarray(ks, dtype=float).reshape(-1, self.params.n, self.params.n)
        Kt = self.orbit_kernel(t)
        s = self.quad.sections()
        out = np.empty((ks.shape[0], self.dim), dtype=complex)
        for start in range(0, ks.shape[0], chunk):
            kk = ks[start:start + chunk]
            nodes = kk[:, None] @ s[None]
            fv = eval_on_K_batch(self.boundary, nodes.reshape(-1, *s.shape[1:]))
            fv = fv.reshape(kk.shape[0], s.shape[0], -1)
            terms = np.einsum("nij,mnj->nmi", Kt, fv)
            out[start:start + chunk] = pairwise_sum(terms)
        if self.debug:
            self._check_invariance(ks[:1], t)
        return out

    def values_from_fiber(self, fv, t):
        """Transform at k_j a_t from precomputed boundary values f(k_j s_i), shape (J, N, dq)."""
        Kt = self.orbit_kernel(t)
        return pairwise_sum(np.einsum("nij,mnj->nmi", Kt, fv))

    def boundary_on_nodes(self, ks):
        """f(k_j s_i) for the rule nodes s_i, shape (J, N, dq)."""
        ks = np.asarray(ks, dtype=float).reshape(-1, self.params.n, self.params.n)
        s = self.quad.sections()
        nodes = ks[:, None] @ s[None]
        fv = eval_on_K_batch(self.boundary, nodes.reshape(-1, *s.shape[1:]))
        return fv.reshape(ks.shape[0], s.shape[0], -1)

    def at(self, g):
        """P f(g) for a single group element."""
        return self.at_many(np.asarray(g, dtype=float)[None])[0]

    def at_many(self, gs):
        gs = np.asarray(gs, dtype=float)
        n = self.params.n
        s = self.quad.sections()
        out = np.empty((gs.shape[0], self.dim), dtype=complex)
        for j, g in enumerate(gs):
            x = g[:n, n]
            r = np.linalg.norm(x)
            R = frame_for(x / r) if r > 1e-300 else np.eye(n)
            ks = R @ s
            A = inverse(g) @ _embed_K_batch(ks)
            Km = kernel_from_products(A, self.params) @ self._iota
            fv = eval_on_K_batch(self.boundary, ks)
            terms = np.einsum("nij,nj->ni", Km, fv)
            out[j] = integrate_values(self.quad, terms)
        if self.debug:
            self._check_invariance_general(gs[0])
        return out

    def _integrand(self, g, ks):
        A = inverse(g) @ _embed_K_batch(ks)
        Km = kernel_from_products(A, self.params) @ self._iota
        fv = eval_on_K_batch(self.boundary, ks)
        return np.einsum("nij,nj->ni", Km, fv)

    def _check_invariance_general(self, g, samples=4, tol=1e-8):
        rng = np.random.default_rng(1)
        n = self.params.n
        ks = np.array([random_rotation(n, rng) for _ in range(samples)])
        ms = embed_M_in_K(np.array([random_rotation(n - 1, rng) for _ in range(samples)]))
        a = self._integrand(g, ks)
        b = self._integrand(g, ks @ ms)
        scale = max(1e-300, float(np.max(np.abs(a))))
        if np.max(np.abs(a - b)) > tol * scale:
            raise ContractError("Poisson integrand is not right-M-invariant")

    def _check_invariance(self, ks, t):
        self._check_invariance_general(_embed_K_batch(ks[0]) @ geodesic(t, self.params.n))


def poisson_transform(field, g):
    """P f(g) as a PForm."""
    return PForm(field.params.n, field.params.p, field.at(g))


# ------------------------------------------------------------ gamma_lambda

def gamma_lambda(params, t_grid=HARDY_T_GRID):
    """sup_t e^{(rho - Re mu) t} phi^{(rho-1/2, -1/2)}_{-i Re mu}(t) over the grid."""
    mu_re = float(np.real(params.mu))
    if mu_re <= 0:
        raise DomainError("gamma_lambda needs Re mu > 0")
    rho = params.rho
    vals = [np.exp((rho - mu_re) * t) * jacobi_phi(rho - 0.5, -0.5, -1j * mu_re, t).real
            for t in t_grid]
    return float(max(vals))


# ------------------------------------------------------------ Hardy norm

@dataclass(frozen=True)
class HardyResult:
    value: float
    per_t: dict
    argmax_t: float


def hardy_norms(field, r_values, t_grid, quad_outer):
    """Hardy norms for several r at once (boundary values shared across t)."""
    params = field.params
    ks = quad_outer.sections()
    fv = field.boundary_on_nodes(ks)
    weight_rate = params.rho - float(np.real(params.mu))
    per = {r: {} for r in r_values}
    for t in t_grid:
        vals = field.values_from_fiber(fv, t)
        mags = np.linalg.norm(vals, axis=1)
        for r in r_values:
            integral = float(np.real(integrate_values(quad_outer, mags ** r)))
            per[r][float(t)] = np.exp(weight_rate * t) * integral ** (1.0 / r)
    out = {}
    for r in r_values:
        tmax = max(per[r], key=per[r].get)
        out[r] = HardyResult(per[r][tmax], per[r], tmax)
    return out


def hardy_norm(field, r, t_grid, quad_outer):
    """max over t_grid of e^{(rho - Re mu) t} (int_K ||P f(k a_t)||^r dk)^{1/r}."""
    if not r > 1:
        raise DomainError("Hardy norm needs r > 1")
    return hardy_norms(field, [r], t_grid, quad_outer)[r].value


@dataclass(frozen=True)
class SandwichResult:
    r: float
    lower: float
    hardy: float
    upper: float

    @property
    def lower_slack(self):
        return self.hardy - self.lower

    @property
    def upper_slack(self):
        return self.upper - self.hardy


def norm_sandwich(field, r_values, t_grid, quad_outer, gamma=None):
    """Check c_{p,q}|c_q| ||f||_r <= ||P f|| <= c_{p,q} gamma_lambda ||f||_r."""
    params = field.params
    gamma = gamma_lambda(params, t_grid) if gamma is None else gamma
    cpq = c_pq(params.n, params.p, params.q)
    cq = abs(c_component(params))
    hardy = hardy_norms(field, r_values, t_grid, quad_outer)
    out = []
    for r in r_values:
        fr = lr_norm(field.boundary, r, quad_outer)
        out.append(SandwichResult(r, cpq * cq * fr, hardy[r].value, cpq * gamma * fr))
    return out


# --------------------------------------------------------------- Fatou

def fatou_limit(field, ks):
    """c_{p,q} c(lambda,p) iota f(k) for rotations ks, shape (J, d)."""
    params = field.params
    C = c_matrix(params) @ field._iota
    fv = eval_on_K_batch(field.boundary, np.asarray(ks, dtype=float).reshape(-1, params.n, params.n))
    return fv @ C.T


def fatou_residuals(field, ks, t):
    """||e^{(rho-mu)t} P f(k a_t) - c_{p,q} c(lambda,p) iota f(k)|| for each k."""
    params = field.params
    vals = field.on_orbit(ks, t)
    lim = fatou_limit(field, ks)
    scaled = np.exp((params.rho - params.mu) * t) * vals
    return np.linalg.norm(scaled - lim, axis=1)


def fatou_residual(field, k, t):
    return float(fatou_residuals(field, np.asarray(k)[None], t)[0])


# ------------------------------------------------------------ inversion

def invert(field, t, ks, quad_h=None):
    """Inversion formula g_t(k) at rotations ks, shape (J, n, n) -> (J, dq).

    g_t(k) = c_{p,q}^{-1} |c_q|^{-2} e^{2(rho - Re mu) t} pi
             int_K P(h a_t, k)^* F(h a_t) dh,   F = P f.

    The h-integral uses a rule focused at k e_1 (where P(h a_t, k) peaks);
    F(h a_t) is evaluated by the field's own tabulated kernel.
    """
    params = field.params
    n, p, q = params.n, params.p, params.q
    quad_h = field.quad if quad_h is None else quad_h
    ks = np.asarray(ks, dtype=float).reshape(-1, n, n)
    if not params.inversion_allowed():
        raise DomainError("inversion needs Re mu > 0 and mu != rho - p + 1 when q = p - 1")
    cq = c_component(params)
    pref = np.exp(2.0 * (params.rho - float(np.real(params.mu))) * t) / (
        c_pq(n, p, q) * abs(cq) ** 2)
    P = project_matrix(n, p, q)
    s = quad_h.sections()
    at = geodesic(-t, n)
    out = np.empty((ks.shape[0], dim(n - 1, q)), dtype=complex)
    for j, k in enumerate(ks):
        R = frame_for(k[:, 0])
        hs = R @ s
        # P(h a_t, k) = kernel of a_{-t} h^{-1} k
        A = at @ _embed_K_batch(np.swapaxes(hs, -1, -2) @ k)
        Kh = kernel_from_products(A, params)
        F = field.on_orbit(hs, t)
        terms = np.einsum("nji,nj->ni", np.conj(Kh), F)
        out[j] = P @ integrate_values(quad_h, terms)
    return pref * out
