"""The Lorentz group SO_0(n,1) and its Iwasawa decomposition G = KAN.

Group elements are (n+1)x(n+1) real matrices preserving the form
x_1^2 + ... + x_n^2 - x_{n+1}^2.  K = SO(n) is the upper-left block,
A = {a_t} the boosts in the (e_1, e_{n+1}) plane, and N the abelian
nilpotent group of matrices I + X + X^2/2 with

    X(y) = [[0, y, 0], [-y^T, 0, y^T], [0, y, 0]],  y in R^{n-1}.

The decomposition is computed exactly from the light-cone vector
xi0 = e_1 + e_{n+1}, which N fixes and a_t scales by e^t.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .exterior import check_orthogonal

LORENTZ_TOL = 1e-10


def lorentz_metric(n):
    """J = diag(1, ..., 1, -1) of size n+1."""
    J = np.eye(n + 1)
    J[n, n] = -1.0
    return J


def check_group_element(g, tol=LORENTZ_TOL):
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] < 3:
        raise DomainError("expected a square matrix of size n+1 >= 3")
    n = g.shape[0] - 1
    J = lorentz_metric(n)
    scale = max(1.0, float(np.max(np.abs(g))) ** 2)
    if np.max(np.abs(g.T @ J @ g - J)) > tol * scale:
        raise DomainError("matrix does not preserve the Lorentz form")
    if g[n, n] < 1.0 - tol:
        raise DomainError("matrix is not in the identity component")
    if abs(np.linalg.det(g) - 1.0) > 1e-8 * scale ** ((n + 1) / 2):
        raise DomainError("matrix has determinant -1")
    return g


def geodesic(t, n):
    """The boost a_t = exp(t H_0) acting in the (e_1, e_{n+1}) plane."""
    a = np.eye(n + 1)
    ch, sh = np.cosh(t), np.sinh(t)
    a[0, 0] = a[n, n] = ch
    a[0, n] = a[n, 0] = sh
    return a


def geodesic_batch(t, n):
    t = np.asarray(t, dtype=float)
    a = np.broadcast_to(np.eye(n + 1), t.shape + (n + 1, n + 1)).copy()
    ch, sh = np.cosh(t), np.sinh(t)
    a[..., 0, 0] = ch
    a[..., n, n] = ch
    a[..., 0, n] = sh
    a[..., n, 0] = sh
    return a


def n_generator(y):
    """The nilpotent Lie algebra element X(y)."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    n = y.shape[0] + 1
    X = np.zeros((n + 1, n + 1))
    X[0, 1:n] = y
    X[n, 1:n] = y
    X[1:n, 0] = -y
    X[1:n, n] = y
    return X


def n_of(y):
    """exp X(y) = I + X + X^2/2 (X^3 = 0)."""
    X = n_generator(y)
    return np.eye(X.shape[0]) + X + 0.5 * (X @ X)


def nbar_of(y):
    """theta(n(y)) = J n(y) J."""
    g = n_of(y)
    J = lorentz_metric(g.shape[0] - 1)
    return J @ g @ J


def embed_K(k):
    """SO(n) as the stabilizer of e_{n+1}."""
    k = check_orthogonal(k, det_one=True)
    n = k.shape[0]
    g = np.eye(n + 1)
    g[:n, :n] = k
    return g


def embed_M(m):
    """SO(n-1) as the stabilizer of e_1 and e_{n+1}."""
    m = check_orthogonal(m, det_one=True)
    n = m.shape[0] + 1
    g = np.eye(n + 1)
    g[1:n, 1:n] = m
    return g


def embed_M_in_K(m):
    """SO(n-1) inside SO(n) as the stabilizer of e_1."""
    m = np.asarray(m, dtype=float)
    n = m.shape[-1] + 1
    k = np.broadcast_to(np.eye(n), m.shape[:-2] + (n, n)).copy()
    k[..., 1:, 1:] = m
    return k


@dataclass(frozen=True)
class IwasawaFactors:
    """Factors of g = embed_K(k) geodesic(t) n_of(y)."""

    k: np.ndarray
    t: float
    y: np.ndarray

    def reassemble(self):
        n = self.k.shape[0]
        return embed_K(self.k) @ geodesic(self.t, n) @ n_of(self.y)


def iwasawa_batch(g):
    """Vectorized Iwasawa decomposition over leading axes.

    Returns (k, t, y) arrays with shapes (..., n, n), (...), (..., n-1).
    No validation is performed; see :func:`iwasawa` for the checked form.
    """
    g = np.asarray(g, dtype=float)
    n = g.shape[-1] - 1
    # g xi0 = e^t (k e_1, 1)
    gx = g[..., :, 0] + g[..., :, n]
    et = gx[..., n]
    if np.any(et <= 0):
        raise DomainError("element is not in the identity component")
    t = np.log(et)
    k = np.empty(g.shape[:-2] + (n, n))
    k1 = gx[..., :n] / et[..., None]
    k[..., :, 0] = k1
    # g e_j = (k e_j, 0) + e^t y_{j-1} (k e_1, 1) for j = 2..n
    last = g[..., n, 1:n]
    k[..., :, 1:] = g[..., :n, 1:n] - k1[..., :, None] * last[..., None, :]
    y = last / et[..., None]
    return k, t, y


def iwasawa(g):
    """Exact Iwasawa factors (k, t, y) of a group element."""
    g = check_group_element(g)
    if (g[:, 0] + g[:, -1])[-1] <= 0:
        raise DomainError("element is not in the identity component")
    k, t, y = iwasawa_batch(g)
    return IwasawaFactors(k, float(t), y)


def H_of(g):
    """Horospherical coordinate H(g) (as the real number t)."""
    return iwasawa(g).t


def kappa_of(g):
    """K-component kappa(g)."""
    return iwasawa(g).k


def inverse(g):
    """Inverse of a Lorentz matrix: J g^T J."""
    g = np.asarray(g)
    n = g.shape[-1] - 1
    J = np.ones(n + 1)
    J[n] = -1.0
    return J[:, None] * np.swapaxes(g, -1, -2) * J[None, :]


# ----------------------------------------------------- K/M and the sphere

def section_batch(b):
    """Rotations k in span{e_1, b} with k e_1 = b, batched over rows of b."""
    b = np.asarray(b, dtype=float)
    n = b.shape[-1]
    c = b[..., 0]
    e1 = np.zeros(n)
    e1[0] = 1.0
    # Rodrigues form: k = I + W + W^2 / (1 + c), W = b e1^T - e1 b^T
    W = b[..., :, None] * e1[None, :] - e1[:, None] * b[..., None, :]
    denom = 1.0 + c
    antipode = denom < 1e-14
    safe = np.where(antipode, 1.0, denom)
    k = np.eye(n) + W + (W @ W) / safe[..., None, None]
    if np.any(antipode):
        flip = np.eye(n)
        flip[0, 0] = flip[1, 1] = -1.0
        k[antipode] = flip
    return k


def section(b):
    """A fixed rotation k with k e_1 = b (diag(-1,-1,1,...) at b = -e_1)."""
    b = np.asarray(b, dtype=float)
    if b.ndim != 1 or b.shape[0] < 2:
        raise DomainError("expected a vector in R^n, n >= 2")
    if abs(np.linalg.norm(b) - 1.0) > 1e-10:
        raise DomainError("section needs a unit vector")
    return section_batch(b)


def m_part_batch(k):
    """(b, m) with k = section(b) embed(m), batched."""
    k = np.asarray(k, dtype=float)
    b = k[..., :, 0]
    s = section_batch(b)
    m = (np.swapaxes(s, -1, -2) @ k)[..., 1:, 1:]
    return b, m


def m_part(k):
    """Factor k = section(b) . embedded m with b = k e_1."""
    k = check_orthogonal(k, det_one=True)
    return m_part_batch(k)


# ---------------------------------------------------------- ball model

def ball_action(g, x):
    """Action of g on the open unit ball through the hyperboloid model."""
    g = check_group_element(g)
    x = np.asarray(x, dtype=float)
    r2 = float(x @ x)
    if r2 >= 1.0:
        raise DomainError("point is not in the open unit ball")
    lift = np.append(2.0 * x, 1.0 + r2) / (1.0 - r2)
    z = g @ lift
    return z[:-1] / (1.0 + z[-1])


# ------------------------------------------------------- random sampling

def random_rotation(n, rng):
    """Haar-random element of SO(n)."""
    if n == 1:
        return np.ones((1, 1))
    A = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(A)
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def random_group_element(n, rng, t_scale=2.0, y_scale=1.5):
    """Product K A Nbar K of random factors."""
    k1 = random_rotation(n, rng)
    k2 = random_rotation(n, rng)
    t = rng.uniform(-t_scale, t_scale)
    y = rng.uniform(-y_scale, y_scale, n - 1)
    return embed_K(k1) @ geodesic(t, n) @ nbar_of(y) @ embed_K(k2)


def exp_matrix(X):
    """Matrix exponential for Lie algebra elements (scaling and squaring)."""
    from scipy.linalg import expm
    return expm(X)
