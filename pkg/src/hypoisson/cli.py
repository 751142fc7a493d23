"""Command-line driver: every experiment as a subcommand emitting a CSV table.

Exit codes: 0 pass, 1 tolerance failure, 2 configuration error.
"""
import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass, field, fields

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__, acceptance, cfun, eisenstein, invops
from .boundary import eval_on_K_batch, lr_norm, random_test_form
from .errors import ConfigError, DomainError
from .lorentz import random_rotation
from .poisson import (PoissonField, fatou_limit, fatou_residuals, gamma_lambda, invert,
                      norm_sandwich)
from .specfun import SpectralParams
from .sphquad import build, build_custom, build_focused, integrate_values

HARDY_STEP = 0.25
DEFAULT_MU_GRID = ((1.0, 0.0), (1.5, 0.0), (2.0, 0.5))


@dataclass
class RunConfig:
    n: int = 4
    p: int = 1
    q: int = 1
    mu_re: float = 1.5
    mu_im: float = 0.0
    quad_level: int = 3
    t_min: float = 2.0
    t_max: float = 6.0
    t_steps: int = 3
    r_values: list = field(default_factory=lambda: [1.5, 2.0, 4.0])
    seed: int = 0
    out_path: str = "-"
    mu_grid: list = None

    def validate(self):
        try:
            self.params()
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
        if self.t_min < 0 or self.t_max < self.t_min:
            raise ConfigError("need 0 <= t_min <= t_max")
        if int(self.t_steps) < 1:
            raise ConfigError("t_steps must be at least 1")
        if int(self.quad_level) < 1:
            raise ConfigError("quad_level must be at least 1")
        if not self.r_values or any(not r > 1 for r in self.r_values):
            raise ConfigError("every r must exceed 1")
        return self

    def params(self):
        return SpectralParams(self.n, self.p, self.q, complex(self.mu_re, self.mu_im))

    def t_grid(self):
        return [float(t) for t in np.linspace(self.t_min, self.t_max, int(self.t_steps))]

    def echo(self):
        return json.dumps(asdict(self), sort_keys=True)


def load_config(path=None, overrides=None):
    data = {}
    if path:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        cfg = RunConfig(**data)
        cfg.n, cfg.p, cfg.q = int(cfg.n), int(cfg.p), int(cfg.q)
        cfg.mu_re, cfg.mu_im = float(cfg.mu_re), float(cfg.mu_im)
        cfg.t_min, cfg.t_max = float(cfg.t_min), float(cfg.t_max)
        cfg.quad_level, cfg.t_steps, cfg.seed = int(cfg.quad_level), int(cfg.t_steps), int(cfg.seed)
        cfg.r_values = [float(r) for r in cfg.r_values]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad config value: {exc}") from exc
    return cfg.validate()


# ------------------------------------------------------------- output

def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


class Table:
    def __init__(self, columns):
        self.columns = list(columns)
        self.rows = []

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError("row length does not match the header")
        self.rows.append([_fmt(v) for v in values])

    def render(self, command, cfg):
        buf = io.StringIO()
        buf.write(f"# hypoisson {__version__} {command}\n")
        buf.write(f"# config {cfg.echo()}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        writer.writerows(self.rows)
        return buf.getvalue()


def _field_quad(cfg):
    return build_focused(cfg.n, cfg.quad_level, smallest=1e-6)


# ----------------------------------------------------------- commands

def cmd_cfun(cfg):
    """Rows: mu, c(lambda), c_{p-1}(lambda,p), c_p(lambda,p), oracle error (matrix-relative)."""
    grid = cfg.mu_grid if cfg.mu_grid else [(cfg.mu_re, cfg.mu_im)] + list(DEFAULT_MU_GRID)
    seen, mus = set(), []
    for re_, im_ in grid:
        key = (float(re_), float(im_))
        if key not in seen:
            seen.add(key)
            mus.append(complex(*key))
    table = Table(["mu_re", "mu_im", "c_scalar_re", "c_scalar_im", "c_qminus_re", "c_qminus_im",
                   "c_q_re", "c_q_im", "oracle_err"])
    ok = True
    for mu in mus:
        params = SpectralParams(cfg.n, cfg.p, cfg.p, mu)
        val = cfun.c_function(params)
        err = float("nan")
        if cfg.n <= 4 and mu.real > 0:
            oracle = cfun.c_integral_oracle(params)
            err = float(np.linalg.norm(oracle.matrix - val.matrix) / np.linalg.norm(val.matrix))
            ok &= err < 1e-4
        table.add(mu.real, mu.imag, val.c_scalar.real, val.c_scalar.imag, val.c_qminus.real,
                  val.c_qminus.imag, val.c_q.real, val.c_q.imag, err)
    return table, ok


def cmd_fatou(cfg, samples=8):
    """Rows per (t, k-sample): ||e^{(rho-mu)t} P f(k a_t) - c_{p,q} c(lambda,p) iota f(k)||."""
    rng = np.random.default_rng(cfg.seed)
    params = cfg.params()
    f = random_test_form(cfg.n, cfg.p, cfg.q, rng)
    field_ = PoissonField(params, f, quad=_field_quad(cfg))
    ks = np.array([random_rotation(cfg.n, rng) for _ in range(samples)])
    fnorm = np.linalg.norm(eval_on_K_batch(f, ks), axis=1)
    table = Table(["t", "sample", "residual", "f_norm", "relative"])
    sups = []
    for t in cfg.t_grid():
        res = fatou_residuals(field_, ks, t)
        for j, r in enumerate(res):
            table.add(t, j, r, fnorm[j], r / fnorm[j])
        sups.append(float(np.max(res / fnorm)))
    ok = sups[-1] < 1e-2 and all(b < a for a, b in zip(sups, sups[1:]))
    return table, ok


def cmd_eigencheck(cfg, points=8):
    """Rows per random point: first-order, Casimir and second-order residuals (relative)."""
    rng = np.random.default_rng(cfg.seed)
    params = cfg.params()
    f = random_test_form(cfg.n, cfg.p, cfg.q, rng)
    field_ = PoissonField(params, f, quad=invops.eigen_quadrature(cfg.n, cfg.quad_level + 1))
    lam_c, lam_l = invops.casimir_eigenvalue(params), invops.laplace_eigenvalue(params)
    table = Table(["point", "field_norm", "first_order", "casimir", "second_order"])
    ok = True
    for j, g in enumerate(invops.eigen_sample_points(cfg.n, rng, points)):
        F = field_.at(g)
        nF = float(np.linalg.norm(F))
        if cfg.q == cfg.p:
            first = invops.apply_Dstar(field_, g).norm() if cfg.p >= 1 else 0.0
            L = invops._apply_Dstar_values(invops.D_field(field_), g) if cfg.p >= 1 else None
        else:
            first = invops.apply_D(field_, g).norm()
            L = invops._apply_D_values(invops.Dstar_field(field_), g)
        C = invops.apply_casimir(field_, g).coeffs
        cas = float(np.linalg.norm(C - lam_c * F)) / (max(abs(lam_c), 1.0) * nF)
        second = (float("nan") if L is None
                  else float(np.linalg.norm(L - lam_l * F)) / (max(abs(lam_l), 1.0) * nF))
        table.add(j, nF, first / nF, cas, second)
        ok &= first / nF < 5e-6 and cas < 1e-4 and (L is None or second < 1e-3)
    return table, ok


def cmd_eisenstein(cfg):
    """Rows per t: quadrature and closed-form scalar components, Schur residual, scaled HS norm."""
    params = cfg.params()
    quad = _field_quad(cfg)
    table = Table(["t", "quad_qminus_re", "quad_qminus_im", "quad_q_re", "quad_q_im",
                   "closed_qminus_re", "closed_qminus_im", "closed_q_re", "closed_q_im",
                   "path_diff", "schur_residual", "scaled_hs", "hs_target"])
    cpq = eisenstein.c_pq(params.n, params.p, params.q)
    target = cpq ** 2 * abs(cfun.c_component(params)) ** 2 * eisenstein.comb(params.n - 1, params.q)
    ok = True
    for t in cfg.t_grid():
        E = eisenstein.eisenstein_quad(params, t, quad)
        comp = eisenstein.scalar_components(E, params.n, params.p)
        ref = eisenstein.eisenstein_closed(params, t)
        diff = max(abs(a - b) / max(1.0, abs(b)) for a, b in zip(comp.as_tuple(), ref.as_tuple())
                   if not (params.p == 0 and b == 0))
        scaled = float(np.exp(2 * (params.rho - params.mu.real) * t) * np.linalg.norm(E / cpq) ** 2)
        table.add(t, comp.f_qminus.real, comp.f_qminus.imag, comp.f_q.real, comp.f_q.imag,
                  ref.f_qminus.real, ref.f_qminus.imag, ref.f_q.real, ref.f_q.imag,
                  diff, comp.residual, scaled, target)
        ok &= diff < 1e-6
    return table, ok


def cmd_invert(cfg):
    """Rows per (t, k-sample) on a 32-node rule; rel_l2 is the relative L^2(K) error at that t.

    The field rule uses level max(1, quad_level - 2): the inversion integral
    nests the field integral inside an integral over K.
    """
    rng = np.random.default_rng(cfg.seed)
    params = cfg.params()
    f = random_test_form(cfg.n, cfg.p, cfg.q, rng)
    field_ = PoissonField(params, f, quad=build_focused(cfg.n, max(1, cfg.quad_level - 2),
                                                        smallest=1e-5))
    sample = build_custom(cfg.n, 4, 2, 4)
    ks = sample.sections()
    exact = eval_on_K_batch(f, ks)

    def l2(v):
        return float(np.sqrt(np.real(integrate_values(sample, np.sum(np.abs(v) ** 2, axis=1)))))

    table = Table(["t", "sample", "error_norm", "f_norm", "rel_l2"])
    rel = float("nan")
    for t in cfg.t_grid():
        approx = invert(field_, t, ks)
        err = np.linalg.norm(approx - exact, axis=1)
        rel = l2(approx - exact) / l2(exact)
        for j in range(len(ks)):
            table.add(t, j, err[j], np.linalg.norm(exact[j]), rel)
    return table, rel < 5e-2


def cmd_hardy(cfg):
    """Rows per r: lower bound, Hardy norm, upper bound and both slacks.

    The Hardy supremum runs over t = 0, 0.25, ..., t_max.
    """
    rng = np.random.default_rng(cfg.seed)
    params = cfg.params()
    field_ = PoissonField(params, random_test_form(cfg.n, cfg.p, cfg.q, rng), quad=_field_quad(cfg))
    t_grid = [float(t) for t in np.arange(0.0, cfg.t_max + 1e-9, HARDY_STEP)]
    outer = build(cfg.n, 1)
    table = Table(["r", "lower", "hardy", "upper", "lower_slack", "upper_slack", "f_norm",
                   "gamma_lambda"])
    gamma = gamma_lambda(params, t_grid)
    ok = True
    for res in norm_sandwich(field_, cfg.r_values, t_grid, outer, gamma=gamma):
        table.add(res.r, res.lower, res.hardy, res.upper, res.lower_slack, res.upper_slack,
                  lr_norm(field_.boundary, res.r, outer), gamma)
        ok &= min(res.lower_slack, res.upper_slack) >= -1e-6 * res.upper
    return table, ok


def cmd_selftest(cfg, report=None):
    """Run the full acceptance suite; 0 when every criterion passes."""
    report = report or (lambda line: print(line, file=sys.stderr))
    results = acceptance.run_all(report)
    table = Table(["criterion", "name", "passed", "measured", "tolerance", "seconds"])
    for r in results:
        table.add(r.number, r.name, r.passed, r.measured, r.tolerance, round(r.seconds, 1))
    return table, all(r.passed for r in results)


COMMANDS = {
    "cfun": cmd_cfun,
    "fatou": cmd_fatou,
    "eigencheck": cmd_eigencheck,
    "eisenstein": cmd_eisenstein,
    "invert": cmd_invert,
    "hardy": cmd_hardy,
    "selftest": cmd_selftest,
}

SCHEMAS = """CSV schemas (after two '#' header lines echoing version and config):
  cfun        mu_re,mu_im,c_scalar_re,c_scalar_im,c_qminus_re,c_qminus_im,c_q_re,c_q_im,oracle_err
  fatou       t,sample,residual,f_norm,relative
  eigencheck  point,field_norm,first_order,casimir,second_order
  eisenstein  t,quad_qminus_re,quad_qminus_im,quad_q_re,quad_q_im,closed_qminus_re,
              closed_qminus_im,closed_q_re,closed_q_im,path_diff,schur_residual,scaled_hs,hs_target
  invert      t,sample,error_norm,f_norm,rel_l2
  hardy       r,lower,hardy,upper,lower_slack,upper_slack,f_norm,gamma_lambda
  selftest    criterion,name,passed,measured,tolerance,seconds
Environment: HYPOISSON_THREADS caps BLAS/OpenMP worker threads.
Exit codes: 0 pass, 1 tolerance failure, 2 configuration error."""


def build_parser():
    parser = argparse.ArgumentParser(prog="hypoisson", description=__doc__.splitlines()[0],
                                     epilog=SCHEMAS,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"hypoisson {__version__}")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="JSON file with RunConfig fields")
    parser.add_argument("--n", type=int)
    parser.add_argument("--p", type=int)
    parser.add_argument("--q", type=int)
    parser.add_argument("--mu-re", dest="mu_re", type=float)
    parser.add_argument("--mu-im", dest="mu_im", type=float)
    parser.add_argument("--quad-level", dest="quad_level", type=int)
    parser.add_argument("--t-min", dest="t_min", type=float)
    parser.add_argument("--t-max", dest="t_max", type=float)
    parser.add_argument("--t-steps", dest="t_steps", type=int)
    parser.add_argument("--r", dest="r_values", type=float, nargs="+")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", dest="out_path", help="output CSV path ('-' for stdout)")
    return parser


def _thread_limit():
    raw = os.environ.get("HYPOISSON_THREADS")
    if raw is None or raw == "":
        return None
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"HYPOISSON_THREADS must be a positive integer, got {raw!r}") from exc
    if value < 1:
        raise ConfigError("HYPOISSON_THREADS must be a positive integer")
    return value


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        cfg = load_config(args.config, overrides)
        threads = _thread_limit()
    except ConfigError as exc:
        print(f"hypoisson: config error: {exc}", file=sys.stderr)
        return 2
    with threadpool_limits(limits=threads):
        try:
            table, ok = COMMANDS[args.command](cfg)
        except DomainError as exc:
            print(f"hypoisson: {exc}", file=sys.stderr)
            return 2
    text = table.render(args.command, cfg)
    if cfg.out_path in ("-", ""):
        sys.stdout.write(text)
    else:
        with open(cfg.out_path, "w", newline="") as fh:
            fh.write(text)
    if not ok:
        print(f"hypoisson: {args.command} tolerance check failed", file=sys.stderr)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
