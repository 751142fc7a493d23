"""Desk-scale acceptance checks (n = 4, p = 1 unless stated), one function per criterion.

Each check returns a CriterionResult with the worst measured quantity and
the tolerance it was held to.  `run_all` drives the CLI self-test and the
acceptance test module.
"""
import itertools
import time
from dataclasses import dataclass
from math import gamma as real_gamma, pi

import numpy as np

from . import cfun, eisenstein, invops
from .boundary import constant_fiber_form, eval_on_K_batch, random_test_form
from .errors import DomainError
from .exterior import (block_projector, c_pq, dim, embed_matrix, exterior_matrix,
                       interior_matrix, project_matrix)
from .lorentz import (embed_K, geodesic, iwasawa_batch, n_of, random_group_element,
                      random_rotation)
from .poisson import HARDY_T_GRID, PoissonField, fatou_residuals, invert, norm_sandwich
from .specfun import SpectralParams, jacobi_c
from .sphquad import build, build_custom, build_focused, integrate_values

N, P = 4, 1
# mu per q: mu = 1.5 sits on the excluded value rho - p + 1 when q = p - 1
MU_FOR_Q = {1: 1.5, 0: 2.0}


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""
    seconds: float = 0.0

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return (f"[{flag}] criterion {self.number:2d} {self.name}: measured {self.measured:.3e} "
                f"(tol {self.tolerance:.1e}) {self.detail} [{self.seconds:.1f}s]")


def _params(q, mu=None):
    return SpectralParams(N, P, q, MU_FOR_Q[q] if mu is None else mu)


def _result(number, name, measured, tol, detail="", ok=None, start=None):
    ok = measured < tol if ok is None else ok
    secs = 0.0 if start is None else time.time() - start
    return CriterionResult(number, name, bool(ok), float(measured), tol, detail, secs)


# ----------------------------------------------------------------- 1

def check_cfunction_oracle(mus=(1.0, 1.5, 2.0 + 0.5j), tol=1e-4):
    """Closed-form c-matrix vs the Nbar-integral, relative to the matrix norm."""
    start = time.time()
    worst, slowest = 0.0, 0.0
    cases = [(N, P, mu) for mu in mus] + [(2, 0, 1.0), (3, 0, 1.5)]
    for n, p, mu in cases:
        t0 = time.time()
        params = SpectralParams(n, p, p, mu)
        oracle = cfun.c_integral_oracle(params)
        closed = cfun.c_matrix(params)
        err = np.linalg.norm(oracle.matrix - closed) / np.linalg.norm(closed)
        worst = max(worst, err)
        slowest = max(slowest, time.time() - t0)
    ok = worst < tol and slowest < 120.0
    return _result(1, "c-function oracle", worst, tol,
                   f"slowest point {slowest:.1f}s", ok, start)


# ----------------------------------------------------------------- 2

def check_ratio_identity(count=100, seed=2, tol=1e-10):
    start = time.time()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(4, 7))
        mu = complex(rng.uniform(0.1, 4.0), rng.uniform(-3.0, 3.0))
        rho = 0.5 * (n - 1)
        lam = -1j * mu
        hi = jacobi_c(n / 2.0, -0.5, lam)
        lo = jacobi_c(n / 2.0 - 1.0, -0.5, lam)
        worst = max(worst, abs(hi - 2.0 * n / (mu + rho) * lo) / abs(hi))
    return _result(2, "Jacobi c ratio identity", worst, tol, f"{count} random mu", start=start)


# ----------------------------------------------------------------- 3

def check_eisenstein_paths(t_values=(0.5, 1.0, 2.0), tol=1e-6, id_tol=1e-8):
    start = time.time()
    worst, id_err = 0.0, 0.0
    for q in (0, 1):
        params = _params(q)
        for t in t_values:
            E = eisenstein.eisenstein_quad(params, t)
            comp = eisenstein.scalar_components(E, N, P)
            ref = eisenstein.eisenstein_closed(params, t)
            for a, b in zip(comp.as_tuple(), ref.as_tuple()):
                worst = max(worst, abs(a - b) / max(1.0, abs(b)))
        E0 = eisenstein.eisenstein_quad(params, 0.0)
        id_err = max(id_err, float(np.max(np.abs(E0 - np.eye(dim(N, P))))))
    ok = worst < tol and id_err < id_tol
    return _result(3, "Eisenstein quadrature vs closed form", worst, tol,
                   f"Phi(e)-Id {id_err:.1e}", ok, start)


# ----------------------------------------------------------------- 4

def check_fatou(forms=5, samples=16, seed=4, tol=1e-2, t_values=(2.0, 4.0, 6.0)):
    """sup_k of the scaled residual against tol * sup_k ||iota f(k)|| (iota is isometric)."""
    start = time.time()
    rng = np.random.default_rng(seed)
    worst, monotone = 0.0, True
    for q in (0, 1):
        params = _params(q)
        for _ in range(forms):
            f = random_test_form(N, P, q, rng)
            field = PoissonField(params, f)
            ks = np.array([random_rotation(N, rng) for _ in range(samples)])
            scale = float(np.max(np.linalg.norm(eval_on_K_batch(f, ks), axis=1)))
            res = [float(np.max(fatou_residuals(field, ks, t))) / scale for t in t_values]
            monotone &= all(b < a for a, b in zip(res, res[1:]))
            worst = max(worst, res[-1])
    return _result(4, "Fatou decay", worst, tol, f"monotone={monotone}",
                   worst < tol and monotone, start)


# ----------------------------------------------------------------- 5

def check_eigen_equations(points=8, seed=5, first_tol=5e-6, cas_tol=1e-4, second_tol=1e-3):
    start = time.time()
    rng = np.random.default_rng(seed)
    w_first = w_cas = w_second = 0.0
    for q in (0, 1):
        params = _params(q)
        f = random_test_form(N, P, q, rng)
        field = PoissonField(params, f, quad=invops.eigen_quadrature(N))
        lam_c = invops.casimir_eigenvalue(params)
        lam_l = invops.laplace_eigenvalue(params)
        for g in invops.eigen_sample_points(N, rng, points):
            F = field.at(g)
            nF = np.linalg.norm(F)
            first = invops.apply_Dstar(field, g) if q == P else invops.apply_D(field, g)
            w_first = max(w_first, first.norm() / nF)
            C = invops.apply_casimir(field, g).coeffs
            w_cas = max(w_cas, np.linalg.norm(C - lam_c * F) / (abs(lam_c) * nF))
            if q == P:
                L = invops._apply_Dstar_values(invops.D_field(field), g)
            else:
                L = invops._apply_D_values(invops.Dstar_field(field), g)
            w_second = max(w_second, np.linalg.norm(L - lam_l * F) / (abs(lam_l) * nF))
    ok = w_first < first_tol and w_cas < cas_tol and w_second < second_tol
    detail = f"D/D* {w_first:.1e}, Casimir {w_cas:.1e}, second order {w_second:.1e}"
    return _result(5, "eigen-equations", max(w_first / first_tol, w_cas / cas_tol,
                                             w_second / second_tol), 1.0, detail, ok, start)


# ----------------------------------------------------------------- 6

def check_norm_sandwich(forms=10, seed=6, r_values=(1.5, 2.0, 4.0), tol=1e-6):
    start = time.time()
    rng = np.random.default_rng(seed)
    quad_outer = build(N, 1)
    worst = np.inf
    for q in (0, 1):
        params = _params(q)
        for _ in range(forms):
            field = PoissonField(params, random_test_form(N, P, q, rng))
            for res in norm_sandwich(field, r_values, HARDY_T_GRID, quad_outer):
                scale = max(res.upper, 1e-300)
                worst = min(worst, res.lower_slack / scale, res.upper_slack / scale)
    return _result(6, "Hardy norm sandwich", -worst, tol,
                   f"min relative slack {worst:.3e}", worst >= -tol, start)


# ----------------------------------------------------------------- 7

def inversion_error(params, f, t=6.0, sample_rule=None, field_quad=None):
    """Relative L^2(K) error of the inversion formula at time t on a sample rule."""
    sample_rule = build_custom(params.n, 4, 2, 4) if sample_rule is None else sample_rule
    field_quad = build_focused(params.n, 1, smallest=1e-5) if field_quad is None else field_quad
    field = PoissonField(params, f, quad=field_quad)
    ks = sample_rule.sections()
    exact = eval_on_K_batch(f, ks)
    approx = invert(field, t, ks)

    def l2(v):
        return np.sqrt(float(np.real(integrate_values(sample_rule, np.sum(np.abs(v) ** 2, axis=1)))))

    return l2(approx - exact) / l2(exact)


def check_inversion(seed=7, tol=5e-2, t=6.0):
    start = time.time()
    rng = np.random.default_rng(seed)
    errs = {}
    for q in (0, 1):
        params = _params(q)
        errs[q] = inversion_error(params, random_test_form(N, P, q, rng), t)
    excluded = False
    try:
        invert(PoissonField(_params(0, 1.5), random_test_form(N, P, 0, rng)), t, np.eye(N)[None])
    except DomainError:
        excluded = True
    worst = max(errs.values())
    secs = time.time() - start
    ok = worst < tol and excluded and secs < 600.0
    detail = f"q=1 (mu=1.5) {errs[1]:.1e}, q=0 (mu=2.0) {errs[0]:.1e}, q=0 mu=1.5 rejected={excluded}"
    return _result(7, "inversion at t=6", worst, tol, detail, ok, start)


# ----------------------------------------------------------------- 8

def check_hs_limit(t_grid=(3.0, 4.5, 6.0), tol=1e-3):
    start = time.time()
    worst, decreasing, bound = 0.0, True, True
    for q in (0, 1):
        res = eisenstein.hs_limit_check(_params(q), t_grid, bound_grid=HARDY_T_GRID)
        worst = max(worst, res.final_deviation)
        decreasing &= res.decreasing
        bound &= res.bound_holds
    return _result(8, "Hilbert-Schmidt limit", worst, tol,
                   f"decreasing={decreasing}, sup bound={bound}",
                   worst < tol and decreasing and bound, start)


# ----------------------------------------------------------------- 9

def check_scalar_degeneration(seed=9, tol=1e-10):
    start = time.time()
    rng = np.random.default_rng(seed)
    params = SpectralParams(N, 0, 0, 0.5 * (N - 1))
    field = PoissonField(params, constant_fiber_form(N, 0, [1.0]))
    gs = np.array([random_group_element(N, rng) for _ in range(6)])
    poisson_one = float(np.max(np.abs(field.at_many(gs) - 1.0)))
    c_err = 0.0
    for _ in range(20):
        mu = complex(rng.uniform(0.1, 3.0), rng.uniform(-2.0, 2.0))
        pr = SpectralParams(N, 0, 0, mu)
        c_err = max(c_err, abs(cfun.c_component(pr) - cfun.c_scalar(pr)) / abs(cfun.c_scalar(pr)))
    harm = 0.0
    for n in range(3, 8):
        for p in range(0, n):
            if 2 * p >= n - 1:
                continue
            rho = 0.5 * (n - 1)
            lower = c_pq(n, p, p) * abs(cfun.c_component(SpectralParams(n, p, p, rho - p)))
            # the harmonic constant bounds from above; the lower constant carries 2(rho-p)/(2rho-p)
            ref = 2.0 * (rho - p) / (2.0 * rho - p) * cfun.harmonic_constant(n, p)
            harm = max(harm, abs(ref - lower) / lower)
    worst = max(poisson_one, c_err, harm)
    detail = f"P1-1 {poisson_one:.1e}, c0-c {c_err:.1e}, harmonic {harm:.1e}"
    return _result(9, "scalar degeneration", worst, tol, detail, start=start)


# ----------------------------------------------------------------- 10

def sphere_moment(a):
    """Exact normalized integral of prod x_i^{a_i} over S^{n-1}."""
    a = np.asarray(a)
    if np.any(a % 2):
        return 0.0
    n = len(a)
    num = np.prod([real_gamma(0.5 * (ai + 1)) for ai in a]) / pi ** (0.5 * n)
    return num * real_gamma(0.5 * n) / real_gamma(0.5 * (a.sum() + n))


def _exterior_structure(n):
    err = 0.0
    rng = np.random.default_rng(10)
    for p in range(n):
        v = rng.standard_normal(n)
        # <v ^ x, y> = <x, iota_v y>
        err = max(err, np.max(np.abs(exterior_matrix(v, n, p).T - interior_matrix(v, n, p + 1))))
    for p in range(1, n):
        total = block_projector(n, p, p) + block_projector(n, p, p - 1)
        err = max(err, np.max(np.abs(total - np.eye(dim(n, p)))))
        err = max(err, np.max(np.abs(block_projector(n, p, p) @ block_projector(n, p, p - 1))))
        for q in (p - 1, p):
            E = embed_matrix(n, p, q)
            err = max(err, np.max(np.abs(E.T @ E - np.eye(dim(n - 1, q)))))
            err = max(err, np.max(np.abs(project_matrix(n, p, q) - E.T)))
    return err


def _iwasawa_reassembly(count, seed=11):
    rng = np.random.default_rng(seed)
    n = N
    gs = np.array([random_group_element(n, rng) for _ in range(count)])
    k, t, y = iwasawa_batch(gs)
    rebuilt = np.array([embed_K(k[i]) @ geodesic(t[i], n) @ n_of(y[i]) for i in range(count)])
    scale = np.max(np.abs(gs), axis=(1, 2))
    return float(np.max(np.max(np.abs(rebuilt - gs), axis=(1, 2)) / scale))


def _quadrature_exactness():
    err = 0.0
    for n in (3, 4):
        for level in (1, 2):
            quad = build(n, level)
            deg = quad.degree
            for a in itertools.product(range(deg + 1), repeat=n):
                if sum(a) > deg:
                    continue
                vals = np.prod(quad.nodes ** np.array(a), axis=1)
                err = max(err, abs(float(integrate_values(quad, vals)) - sphere_moment(a)))
    return err


def _total_mass(t_values=(0.5, 2.0, 4.0)):
    err = 0.0
    rho = 0.5 * (N - 1)
    quad = build_focused(N, 3, smallest=1e-6)
    s = quad.sections()
    for t in t_values:
        A = geodesic(-t, N) @ np.array([embed_K(k) for k in s])
        _, H, _ = iwasawa_batch(A)
        err = max(err, abs(float(integrate_values(quad, np.exp(-2.0 * rho * H))) - 1.0))
    return err


def check_structural(count=10000, tol_iwasawa=1e-9, tol_mass=1e-6, tol_exact=1e-12):
    start = time.time()
    ext = _exterior_structure(N)
    iw = _iwasawa_reassembly(count)
    ex = _quadrature_exactness()
    mass = _total_mass()
    ok = ext < 1e-12 and iw < tol_iwasawa and ex < tol_exact and mass < tol_mass
    detail = f"exterior {ext:.1e}, Iwasawa {iw:.1e}, exactness {ex:.1e}, mass {mass:.1e}"
    return _result(10, "structural suites", max(ext, iw, ex, mass), tol_mass, detail, ok, start)


CHECKS = (check_cfunction_oracle, check_ratio_identity, check_eisenstein_paths, check_fatou,
          check_eigen_equations, check_norm_sandwich, check_inversion, check_hs_limit,
          check_scalar_degeneration, check_structural)


def run_all(report=print):
    results = []
    for check in CHECKS:
        res = check()
        report(res.line())
        results.append(res)
    return results
