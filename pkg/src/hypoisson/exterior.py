"""Exterior algebra of C^n with the standard Hermitian structure.

A p-form is stored as a complex coefficient vector over the basis e_I,
I = (i_1 < ... < i_p) in lexicographic order.  Operators (interior and
exterior products, Hodge star, the natural SO(n) action, the embeddings
of forms over C^{n-1} = span{e_2, ..., e_n}) are realized as dense
matrices on these vectors.
"""
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from .errors import DomainError

ORTHO_TOL = 1e-10


@lru_cache(maxsize=None)
def subsets(n, p):
    """All increasing 1-based index tuples of length p in lexicographic order."""
    if n < 0 or p < 0 or p > n:
        raise DomainError(f"no {p}-subsets of {{1..{n}}}")
    return tuple(combinations(range(1, n + 1), p))


@lru_cache(maxsize=None)
def _rank_table(n, p):
    return {I: r for r, I in enumerate(subsets(n, p))}


def dim(n, p):
    """Dimension C(n, p) of the p-th exterior power of C^n."""
    return comb(n, p)


def rank(indices, n):
    """Lexicographic rank of a strictly increasing index tuple."""
    I = tuple(int(i) for i in indices)
    if any(a >= b for a, b in zip(I, I[1:])) or any(i < 1 or i > n for i in I):
        raise DomainError(f"invalid multi-index {I} for n={n}")
    return _rank_table(n, len(I))[I]


def unrank(r, n, p):
    """Inverse of :func:`rank`."""
    S = subsets(n, p)
    if not 0 <= r < len(S):
        raise DomainError(f"rank {r} out of range for C({n},{p})={len(S)}")
    return S[r]


@dataclass(frozen=True)
class PForm:
    """A p-form on C^n given by its coefficients in the e_I basis."""

    n: int
    p: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if c.shape[0] != dim(self.n, self.p):
            raise DomainError(
                f"expected {dim(self.n, self.p)} coefficients, got {c.shape[0]}")
        object.__setattr__(self, "coeffs", c)

    def __add__(self, other):
        _check_same(self, other)
        return PForm(self.n, self.p, self.coeffs + other.coeffs)

    def __sub__(self, other):
        _check_same(self, other)
        return PForm(self.n, self.p, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return PForm(self.n, self.p, scalar * self.coeffs)

    __rmul__ = __mul__

    def norm(self):
        return float(np.linalg.norm(self.coeffs))


def _check_same(a, b):
    if (a.n, a.p) != (b.n, b.p):
        raise DomainError(f"form mismatch: (n,p)=({a.n},{a.p}) vs ({b.n},{b.p})")


def basis_form(n, indices):
    """The basis element e_I as a PForm."""
    I = tuple(indices)
    c = np.zeros(dim(n, len(I)), dtype=complex)
    c[rank(I, n)] = 1.0
    return PForm(n, len(I), c)


def zero_form(n, p):
    return PForm(n, p, np.zeros(dim(n, p), dtype=complex))


def wedge_vectors(vectors, n):
    """The decomposable form v_1 ^ ... ^ v_p from a list of vectors."""
    V = np.asarray(vectors, dtype=complex).reshape(-1, n)
    p = V.shape[0]
    c = np.array([np.linalg.det(V[:, np.array(I) - 1]) if p else 1.0
                  for I in subsets(n, p)], dtype=complex)
    return PForm(n, p, c)


def inner(omega, xi):
    """Hermitian inner product, conjugate-linear in the second argument."""
    _check_same(omega, xi)
    return complex(np.dot(omega.coeffs, np.conj(xi.coeffs)))


# ---------------------------------------------------------------- matrices

@lru_cache(maxsize=None)
def _interior_basis_matrices(n, p):
    """Matrices of iota_{e_j}: Lambda^p -> Lambda^{p-1}, for j = 1..n."""
    out = np.zeros((n, dim(n, p - 1), dim(n, p)))
    for col, I in enumerate(subsets(n, p)):
        for r, j in enumerate(I):
            rest = I[:r] + I[r + 1:]
            out[j - 1, rank(rest, n), col] = (-1) ** r
    out.setflags(write=False)
    return out


def interior_matrix(v, n, p):
    """Matrix of omega -> iota_v omega on Lambda^p C^n."""
    if not 1 <= p <= n:
        raise DomainError(f"interior product needs 1 <= p <= n, got p={p}")
    v = np.asarray(v, dtype=float).reshape(n)
    return np.tensordot(v, _interior_basis_matrices(n, p), axes=1)


def exterior_matrix(v, n, p):
    """Matrix of omega -> v ^ omega on Lambda^p C^n (adjoint of iota_v)."""
    if not 0 <= p <= n - 1:
        raise DomainError(f"exterior product needs 0 <= p <= n-1, got p={p}")
    return interior_matrix(v, n, p + 1).T.copy()


def interior(v, omega):
    """Interior product iota_v omega."""
    if omega.p == 0:
        raise DomainError("interior product of a 0-form")
    M = interior_matrix(v, omega.n, omega.p)
    return PForm(omega.n, omega.p - 1, M @ omega.coeffs)


def exterior_mul(v, omega):
    """Exterior product v ^ omega."""
    if omega.p == omega.n:
        raise DomainError("exterior product of a top-degree form")
    M = exterior_matrix(v, omega.n, omega.p)
    return PForm(omega.n, omega.p + 1, M @ omega.coeffs)


def _perm_sign(seq):
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@lru_cache(maxsize=None)
def hodge_matrix(n, p):
    """Matrix of the Hodge star Lambda^p -> Lambda^{n-p}."""
    out = np.zeros((dim(n, n - p), dim(n, p)))
    full = set(range(1, n + 1))
    for col, I in enumerate(subsets(n, p)):
        Ic = tuple(sorted(full - set(I)))
        out[rank(Ic, n), col] = _perm_sign(I + Ic)
    out.setflags(write=False)
    return out


def hodge_star(omega):
    return PForm(omega.n, omega.n - omega.p, hodge_matrix(omega.n, omega.p) @ omega.coeffs)


@lru_cache(maxsize=None)
def _index_arrays(n, p):
    return np.array(subsets(n, p), dtype=int).reshape(-1, p) - 1


def tau_matrix(k, p):
    """Matrix of Lambda^p k, batched over leading axes of k.

    Entry (I, J) is the minor det k[I, J], so that the column J holds the
    coefficients of k e_{j_1} ^ ... ^ k e_{j_p}.
    """
    k = np.asarray(k)
    n = k.shape[-1]
    batch = k.shape[:-2]
    if p == 0:
        return np.ones(batch + (1, 1), dtype=k.dtype)
    if p == 1:
        return k.copy()
    idx = _index_arrays(n, p)
    if p == 2:
        a, b = idx[:, 0], idx[:, 1]
        kaa = k[..., a[:, None], a[None, :]]
        kbb = k[..., b[:, None], b[None, :]]
        kab = k[..., a[:, None], b[None, :]]
        kba = k[..., b[:, None], a[None, :]]
        return kaa * kbb - kab * kba
    sub = k[..., idx[:, None, :, None], idx[None, :, None, :]]
    return np.linalg.det(sub)


def check_orthogonal(k, tol=ORTHO_TOL, det_one=False):
    k = np.asarray(k, dtype=float)
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise DomainError("expected a square matrix")
    err = np.max(np.abs(k.T @ k - np.eye(k.shape[0])))
    if err > tol:
        raise DomainError(f"matrix is not orthogonal (defect {err:.2e})")
    if det_one and abs(np.linalg.det(k) - 1.0) > 1e-8:
        raise DomainError("orthogonal matrix has determinant -1")
    return k


def tau_apply(k, omega):
    """The natural action k (v_1 ^ ... ^ v_p) = k v_1 ^ ... ^ k v_p."""
    k = check_orthogonal(k)
    if k.shape[0] != omega.n:
        raise DomainError("dimension mismatch")
    return PForm(omega.n, omega.p, tau_matrix(k, omega.p) @ omega.coeffs)


# ------------------------------------------- M-decomposition of Lambda^p C^n

def _check_q(p, q):
    if q not in (p - 1, p) or q < 0:
        raise DomainError(f"boundary degree q={q} must be p-1 or p (p={p})")


@lru_cache(maxsize=None)
def embed_matrix(n, p, q):
    """Isometric M-equivariant embedding Lambda^q C^{n-1} -> Lambda^p C^n.

    C^{n-1} sits inside C^n as span{e_2, ..., e_n}.  For q = p - 1 the
    embedding is xi -> e_1 ^ xi, for q = p it is the inclusion.
    """
    _check_q(p, q)
    out = np.zeros((dim(n, p), dim(n - 1, q)))
    for col, J in enumerate(subsets(n - 1, q)):
        shifted = tuple(j + 1 for j in J)
        target = (1,) + shifted if q == p - 1 else shifted
        out[rank(target, n), col] = 1.0
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def project_matrix(n, p, q):
    """Orthogonal projection Lambda^p C^n -> Lambda^q C^{n-1}, adjoint of embed."""
    out = embed_matrix(n, p, q).T.copy()
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def block_projector(n, p, q):
    """embed o project: orthogonal projector onto the q-block of Lambda^p C^n."""
    out = embed_matrix(n, p, q) @ project_matrix(n, p, q)
    out.setflags(write=False)
    return out


def embed(q, xi, p):
    """Embed a q-form over C^{n-1} into Lambda^p C^n (q in {p-1, p})."""
    _check_q(p, q)
    if xi.p != q:
        raise DomainError(f"expected a {q}-form, got degree {xi.p}")
    n = xi.n + 1
    return PForm(n, p, embed_matrix(n, p, q) @ xi.coeffs)


def project(q, omega):
    """Project a p-form on C^n to its Lambda^q C^{n-1} component."""
    _check_q(omega.p, q)
    n = omega.n
    return PForm(n - 1, q, project_matrix(n, omega.p, q) @ omega.coeffs)


def sigma_matrix(m, q):
    """Matrix of sigma_q(m) on Lambda^q C^{n-1} for m in SO(n-1)."""
    return tau_matrix(m, q)


def c_pq(n, p, q):
    """Normalizing constant sqrt(C(n,p) / C(n-1,q))."""
    _check_q(p, q)
    return float(np.sqrt(comb(n, p) / comb(n - 1, q)))
