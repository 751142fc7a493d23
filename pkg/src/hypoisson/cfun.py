"""The generalized Harish-Chandra c-function on p-forms.

Closed form: c(lambda) = 2^{rho-mu} Gamma(mu) Gamma(rho+1/2) /
(Gamma((mu+rho)/2) Gamma((mu+rho+1)/2)) with mu = i lambda, and the two
scalar components on the M-blocks Lambda^{p-1} C^{n-1} and Lambda^p C^{n-1}:

    c_p(lambda, p)     = (mu + rho - p) / (mu + rho) * c(lambda)
    c_{p-1}(lambda, p) = (mu - rho + p - 1) / (mu + rho) * c(lambda)

The oracle evaluates the defining Nbar-integral by tensor Gauss-Legendre
quadrature in the Lebesgue coordinate y of nbar(y).
"""
import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from .errors import DomainError, PoleError
from .exterior import block_projector, dim, tau_matrix
from .lorentz import iwasawa_batch
from .specfun import SpectralParams, _log_gamma_checked


def _log_c(mu, rho):
    return ((rho - mu) * math.log(2.0) + _log_gamma_checked(mu) + _log_gamma_checked(rho + 0.5)
            - _log_gamma_checked((mu + rho) / 2.0) - _log_gamma_checked((mu + rho + 1.0) / 2.0))


def c_scalar(params):
    """Scalar Harish-Chandra c-function c(lambda) at mu = params.mu."""
    mu = complex(params.mu)
    if abs(mu.imag) < 1e-14 and mu.real <= 0 and abs(mu.real - round(mu.real)) < 1e-14:
        raise PoleError(f"c(lambda) has a pole at mu = {mu}")
    return cmath.exp(_log_c(mu, params.rho))


def c_component_for(params, q):
    """Scalar component c_q(lambda, p) on the Lambda^q C^{n-1} block."""
    mu, rho, p = complex(params.mu), params.rho, params.p
    c = c_scalar(params)
    if q == p:
        return (mu + rho - p) / (mu + rho) * c
    if q == p - 1:
        return (mu - (rho - p + 1)) / (mu + rho) * c
    raise DomainError(f"q={q} must be p-1 or p")


def c_component(params):
    """c_q(lambda, p) for the q stored in params."""
    return c_component_for(params, params.q)


def c_matrix(params):
    """Block-scalar endomorphism c(lambda, p) of Lambda^p C^n."""
    n, p = params.n, params.p
    out = c_component_for(params, p) * block_projector(n, p, p).astype(complex)
    if p >= 1:
        out = out + c_component_for(params, p - 1) * block_projector(n, p, p - 1)
    return out


@dataclass(frozen=True)
class CFunctionValue:
    params: SpectralParams
    c_scalar: complex
    c_qminus: complex
    c_q: complex
    matrix: np.ndarray


def c_function(params):
    """All closed-form c-function data at once."""
    p = params.p
    cq_minus = c_component_for(params, p - 1) if p >= 1 else complex("nan")
    return CFunctionValue(params, c_scalar(params), cq_minus,
                          c_component_for(params, p), c_matrix(params))


def harmonic_constant(n, p):
    """c_p(rho) = c_{p,p} 2^p Gamma(rho+1/2) Gamma(rho-p) / (Gamma(rho-p/2) Gamma(rho-p/2+1/2)).

    Constant relating co-closed harmonic p-forms to their boundary values
    (the eigenvalue parameter mu = rho - p).
    """
    rho = 0.5 * (n - 1)
    cpp = math.sqrt(math.comb(n, p) / math.comb(n - 1, p))
    val = cmath.exp(p * math.log(2.0) + _log_gamma_checked(rho + 0.5) + _log_gamma_checked(rho - p)
                    - _log_gamma_checked(rho - p / 2.0) - _log_gamma_checked(rho - p / 2.0 + 0.5))
    return cpp * val.real


# ------------------------------------------------------------- oracle

def nbar_batch(Y):
    """theta(n(y)) for rows of Y, shape (N, n-1) -> (N, n+1, n+1)."""
    Y = np.asarray(Y, dtype=float)
    N, m = Y.shape
    n = m + 1
    s = 0.5 * np.sum(Y * Y, axis=1)
    g = np.zeros((N, n + 1, n + 1))
    g[:, 0, 0] = 1.0 - s
    g[:, 0, 1:n] = Y
    g[:, 0, n] = -s
    g[:, 1:n, 0] = -Y
    idx = np.arange(1, n)
    g[:, idx, idx] = 1.0
    g[:, 1:n, n] = -Y
    g[:, n, 0] = s
    g[:, n, 1:n] = -Y
    g[:, n, n] = 1.0 + s
    return g


def graded_panels(R, base=0.5, pts=8):
    """Composite Gauss-Legendre nodes on [-R, R] with panels doubling away from 0.

    Panel edges are R 2^{-j} down to about `base`, so R/2 is always an edge.
    """
    edges = [R]
    while edges[-1] / 2.0 >= base:
        edges.append(edges[-1] / 2.0)
    edges = np.array([0.0] + edges[::-1])
    g, w = roots_legendre(pts)
    lo, hi = edges[:-1, None], edges[1:, None]
    x = (0.5 * (hi - lo) * g + 0.5 * (hi + lo)).reshape(-1)
    wx = (0.5 * (hi - lo) * w).reshape(-1)
    return np.concatenate([-x[::-1], x]), np.concatenate([wx[::-1], wx])


def _nbar_integrals(params, radii, pts, chunk=200000):
    """Integrals over |y| <= R of the c-integrand and of e^{-2 rho H}, for each R."""
    n, p = params.n, params.p
    mu, rho = complex(params.mu), params.rho
    x, wx = graded_panels(max(radii), pts=pts)
    m = n - 1
    grids = np.meshgrid(*([x] * m), indexing="ij")
    wgrid = np.ones_like(grids[0])
    for ax in range(m):
        shape = [1] * m
        shape[ax] = -1
        wgrid = wgrid * wx.reshape(shape)
    Y = np.stack([g.reshape(-1) for g in grids], axis=1)
    W = wgrid.reshape(-1)
    r2 = np.sum(Y * Y, axis=1)
    d = dim(n, p)
    mats = [np.zeros((d, d), dtype=complex) for _ in radii]
    zs = [0.0 for _ in radii]
    for start in range(0, Y.shape[0], chunk):
        sl = slice(start, start + chunk)
        k, t, _ = iwasawa_batch(nbar_batch(Y[sl]))
        T = tau_matrix(k, p)
        amp = np.exp(-(mu + rho) * t) * W[sl]
        base = np.exp(-2.0 * rho * t) * W[sl]
        for i, R in enumerate(radii):
            inside = r2[sl] <= R * R
            mats[i] += np.einsum("n,nij->ij", amp * inside, T)
            zs[i] += float(np.sum(base * inside))
    return mats, zs


def nbar_normalizer(n, R=200.0, pts=8):
    """Z(n) = int e^{-2 rho H(nbar(y))} dy by the oracle's quadrature (tail-extrapolated)."""
    params = SpectralParams(n, 0, 0, 0.5 * (n - 1))
    _, zs = _nbar_integrals(params, [R / 2.0, R], pts)
    return _extrapolate(zs[0], zs[1], 2.0 * params.rho)


def _extrapolate(I_half, I_full, decay):
    """Richardson in R for a tail decaying like R^{-decay}."""
    factor = 2.0 ** decay
    return I_full + (I_full - I_half) / (factor - 1.0)


@dataclass(frozen=True)
class OracleResult:
    matrix: np.ndarray
    normalizer: float
    tail_estimate: float


def c_integral_oracle(params, R=200.0, grid=8, extrapolate=True):
    """Nbar-integral (1/Z) int_{|y|<=R} e^{-(mu+rho)H(nbar(y))} tau_p(kappa(nbar(y))) dy.

    `grid` is the number of Gauss-Legendre points per panel; panels double
    in width away from the origin.  With extrapolate=True the results for
    R/2 and R are combined to cancel the leading R^{-2 mu} tail (and the
    R^{-2 rho} tail of Z).  The tail estimate reports the size of that
    correction.
    """
    mu = complex(params.mu)
    if mu.real <= 0:
        raise DomainError("the Nbar-integral diverges for Re(mu) <= 0")
    if params.n > 4:
        raise DomainError("the oracle integrates over R^{n-1}; supported for n <= 4")
    rho = params.rho
    mats, zs = _nbar_integrals(params, [R / 2.0, R], grid)
    if extrapolate:
        # integrand ~ |y|^{-2(mu+rho)} in dimension n-1 = 2 rho: tail ~ R^{-2 mu}
        fac = 2.0 ** (2.0 * mu)
        mat = mats[1] + (mats[1] - mats[0]) / (fac - 1.0)
        Z = zs[1] + (zs[1] - zs[0]) / (2.0 ** (2.0 * rho) - 1.0)
    else:
        mat, Z = mats[1], zs[1]
    tail = float(np.max(np.abs(mats[1] - mats[0]))) / Z
    return OracleResult(mat / Z, Z, tail)


def block_scalars(E, n, p):
    """(c_{p-1}, c_p) read off from an endomorphism by block traces."""
    out = []
    for q in (p - 1, p):
        if q < 0:
            out.append(complex("nan"))
            continue
        P = block_projector(n, p, q)
        out.append(complex(np.trace(P @ E) / dim(n - 1, q)))
    return tuple(out)
