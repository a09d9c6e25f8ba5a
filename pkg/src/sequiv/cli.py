"""Command-line driver: one subcommand per verification suite.

Exit status is 0 when every check passes, 2 when a check misses its
tolerance and 1 for usage or domain errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import classical, exactpoly, fourier, master, spectral, suites
from .errors import SequivError, ToleranceNotMet
from .numerics import OdeSpec
from .tables import table_to_csv, table_to_json

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_TOLERANCE = 2

ENV_PREFIX = "SEQUIV_"
SETTING_KEYS = ("tol", "n_max", "gamma", "format", "out", "parallel")
FORMATS = ("csv", "json")

CHECK_COLUMNS = ("suite", "check", "value", "tol", "err_estimate", "passed")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    """Resolved shared settings; ``None`` means "use the subcommand default"."""

    tol: float | None = None
    n_max: int | None = None
    gamma: float = 0.5
    format: str = "csv"
    out: str | None = None
    parallel: bool = False

    def __post_init__(self):
        if self.tol is not None and not self.tol > 0:
            raise UsageError("tol must be positive")
        if self.n_max is not None and self.n_max < 0:
            raise UsageError("n-max must be nonnegative")
        if self.format not in FORMATS:
            raise UsageError(f"format must be one of {', '.join(FORMATS)}")


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off", ""):
        return False
    raise UsageError(f"not a boolean: {text!r}")


_CONVERTERS = {
    "tol": float,
    "n_max": int,
    "gamma": float,
    "format": str,
    "out": str,
    "parallel": _parse_bool,
}


def read_config_file(path: str | os.PathLike) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment, keys accept ``-`` or ``_``."""
    settings = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in SETTING_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        settings[key] = value
    return settings


def read_env(environ=None) -> dict:
    environ = os.environ if environ is None else environ
    return {k: environ[ENV_PREFIX + k.upper()] for k in SETTING_KEYS if ENV_PREFIX + k.upper() in environ}


def resolve_config(args: argparse.Namespace, environ=None) -> RunConfig:
    """Precedence, lowest first: built-in defaults, config file, environment, flags."""
    raw: dict = {}
    if getattr(args, "config", None):
        raw.update(read_config_file(args.config))
    raw.update(read_env(environ))
    values = {}
    for key, text in raw.items():
        try:
            values[key] = _CONVERTERS[key](text)
        except ValueError as exc:
            raise UsageError(f"bad value for {key}: {text!r}") from exc
    for key in SETTING_KEYS:
        if hasattr(args, key):
            values[key] = getattr(args, key)
    return RunConfig(**values)


def _shared_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    s = argparse.SUPPRESS
    p.add_argument("--tol", type=float, default=s, help="tolerance override")
    p.add_argument("--n-max", dest="n_max", type=int, default=s, help="largest index")
    p.add_argument("--gamma", type=float, default=s, help="extension label (default 0.5)")
    p.add_argument("--format", choices=FORMATS, default=s, help="output format (default csv)")
    p.add_argument("--out", default=s, help="write output to this file instead of stdout")
    p.add_argument("--parallel", action="store_true", default=s, help="run independent suites concurrently")
    p.add_argument("--config", default=s, help="key=value settings file")
    return p


def build_parser() -> argparse.ArgumentParser:
    shared = _shared_flags()
    parser = _Parser(
        prog="sequiv",
        description="Numerical and exact checks for the alternative Hamiltonian H' = sqrt(2V) cosh p'.",
        epilog=(
            f"Shared settings may come from --config FILE (key=value lines) or from environment "
            f"variables {ENV_PREFIX}TOL, {ENV_PREFIX}N_MAX, {ENV_PREFIX}GAMMA, {ENV_PREFIX}FORMAT, "
            f"{ENV_PREFIX}OUT, {ENV_PREFIX}PARALLEL. Flags override the environment, which overrides "
            "the config file. Exit status: 0 all checks pass, 2 tolerance failure, 1 usage or domain error."
        ),
        parents=[shared],
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("wpoly", parents=[shared], help="exact W_n coefficient table (default n-max 4)")
    sub.add_parser("gram", parents=[shared], help="Gram matrix of W_n under 1/cosh(pi x)")

    p = sub.add_parser("trajectory", parents=[shared], help="phase-space trajectory of either model")
    p.add_argument("--model", choices=(classical.STANDARD, classical.ALTERNATIVE), default=classical.ALTERNATIVE)
    p.add_argument("--x0", type=float, default=1.0)
    p.add_argument("--momentum0", type=float, default=0.0)
    p.add_argument("--t-end", dest="t_end", type=float, default=1.4)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--method", choices=("rk4-fixed", "rk45-adaptive"), default="rk4-fixed")
    p.add_argument("--offset", type=float, default=0.0, help="constant added to V = x^2/2")

    p = sub.add_parser("master", parents=[shared], help="solve H'' = H' in p' at fixed x")
    p.add_argument("--x", type=float, default=1.0)
    p.add_argument("--offset", type=float, default=0.0, help="constant added to V = x^2/2")
    p.add_argument("--p-max", dest="p_max", type=float, default=5.0)
    p.add_argument("--grid", type=int, default=5000)

    p = sub.add_parser("eigencheck", parents=[shared], help="finite-difference residuals of K Psi = lambda Psi")
    p.add_argument("--n-min", dest="n_min", type=int, default=-4)

    sub.add_parser("fourier", parents=[shared], help="numerical transform vs closed form (default n-max 3)")

    p = sub.add_parser("parseval", parents=[shared], help="Parseval partial sums for the Gaussian")
    p.add_argument("--terms", type=int, default=64, help="sum over |n| <= terms")

    sub.add_parser("report", parents=[shared], help="run every suite and summarise")
    return parser


def _emit(text: str, cfg: RunConfig):
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _render(columns, rows, cfg: RunConfig) -> str:
    return table_to_csv(columns, rows) if cfg.format == "csv" else table_to_json(columns, rows)


def _summary(failures: int, total: int) -> int:
    status = "PASS" if failures == 0 else "FAIL"
    print(f"{status}: {total - failures}/{total} checks within tolerance", file=sys.stderr)
    return EXIT_OK if failures == 0 else EXIT_TOLERANCE


def _check_rows(results):
    for res in results:
        for c in res.checks:
            yield (res.suite, c.name, c.value, c.tol, c.err_estimate, c.passed)


def _emit_suites(results, cfg: RunConfig) -> int:
    rows = list(_check_rows(results))
    _emit(_render(CHECK_COLUMNS, rows, cfg), cfg)
    return _summary(sum(not r[-1] for r in rows), len(rows))


def cmd_wpoly(args, cfg: RunConfig) -> int:
    n_max = 4 if cfg.n_max is None else cfg.n_max
    rows = []
    failures = 0
    for n in range(n_max + 1):
        w = exactpoly.w_poly(n)
        coeffs = " ".join(str(c) for c in w.real_coeffs())
        # replay W_{n+1} + n^2 W_{n-1} = 2x W_n
        ok = n == 0 or exactpoly.w_poly(n + 1) + exactpoly.w_poly(n - 1).scale(n * n) == (exactpoly.X * w).scale(2)
        failures += not ok
        rows.append((n, str(w), coeffs, ok))
    _emit(_render(("n", "polynomial", "coefficients", "recurrence_ok"), rows, cfg), cfg)
    return _summary(failures, len(rows))


def cmd_gram(args, cfg: RunConfig) -> int:
    n_max = 8 if cfg.n_max is None else cfg.n_max
    tol = 1e-8 if cfg.tol is None else cfg.tol
    gram, err = fourier.gram_w_estimate(n_max)
    rows = []
    for n, k, value, expected, abs_err, est in fourier.gram_rows(gram, err):
        measure = abs_err / expected if n == k else abs_err
        rows.append((n, k, value, expected, abs_err, est, measure <= tol))
    _emit(_render(fourier.GRAM_COLUMNS + ("passed",), rows, cfg), cfg)
    return _summary(sum(not r[-1] for r in rows), len(rows))


def cmd_trajectory(args, cfg: RunConfig) -> int:
    pot = classical.oscillator(args.offset)
    model = classical.HamiltonianModel(args.model, pot)
    spec = OdeSpec(method=args.method, step=args.step, abs_tol=cfg.tol or 1e-8)
    traj = classical.integrate_flow(model, args.x0, args.momentum0, (0.0, args.t_end), spec)
    _emit(traj.to_csv() if cfg.format == "csv" else traj.to_json(), cfg)
    if traj.stopped:
        print(f"SingularityStop: last valid t = {traj.t_valid:.16e}", file=sys.stderr)
    return EXIT_OK


def cmd_master(args, cfg: RunConfig) -> int:
    tol = 1e-6 if cfg.tol is None else cfg.tol
    pot = classical.oscillator(args.offset)
    sol = master.solve_master(master.MasterProblem(pot, args.x, args.p_max, args.grid))
    closed = master.closed_form_hprime(pot, args.x, sol.p)
    err = np.abs(sol.h - closed)
    if cfg.format == "csv":
        _emit(sol.to_csv(pot, args.x), cfg)
    else:
        columns = ("p_prime", "h_prime", "dh_prime", "closed_form", "abs_error")
        _emit(table_to_json(columns, zip(sol.p, sol.h, sol.dh, closed, err)), cfg)
    print(f"alpha = {sol.alpha_coeff:.16e}, beta = {sol.beta_coeff:.16e}", file=sys.stderr)
    return _summary(int(err.max() > tol), 1)


def cmd_eigencheck(args, cfg: RunConfig) -> int:
    tol = 1e-6 if cfg.tol is None else cfg.tol
    n_max = 4 if cfg.n_max is None else cfg.n_max
    if n_max < args.n_min:
        raise UsageError("empty index range")
    res = suites.eigencheck_suite(cfg.gamma, (args.n_min, n_max), tol)
    return _emit_suites([res], cfg)


def cmd_fourier(args, cfg: RunConfig) -> int:
    tol = 1e-8 if cfg.tol is None else cfg.tol
    n_max = 3 if cfg.n_max is None else cfg.n_max
    rows = fourier.transform_table(range(-n_max, n_max + 1), np.linspace(-3.0, 3.0, 25))
    table = [(r.n, r.x, r.numeric_re, r.numeric_im, r.closed, r.abs_error, r.err_estimate) for r in rows]
    _emit(_render(fourier.TRANSFORM_COLUMNS, table, cfg), cfg)
    failures = sum(max(r.abs_error, abs(r.numeric_im)) > tol for r in rows)
    return _summary(failures, len(rows))


def cmd_parseval(args, cfg: RunConfig) -> int:
    tol = 1e-6 if cfg.tol is None else cfg.tol
    if args.terms < 0:
        raise UsageError("terms must be nonnegative")
    res = spectral.parseval_check(suites.gaussian, cfg.gamma, args.terms)
    rows = [(k, s, res.norm_sq - s) for k, s in enumerate(res.partial_sums)]
    _emit(_render(("N", "partial_sum", "defect"), rows, cfg), cfg)
    print(f"norm^2 = {res.norm_sq:.16e}, defect = {res.defect:.16e}", file=sys.stderr)
    return _summary(int(abs(res.defect) > tol), 1)


def cmd_report(args, cfg: RunConfig) -> int:
    def run(name):
        return suites.run_named(name, cfg.tol, cfg.gamma)

    if cfg.parallel:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(run, suites.REPORT_SUITES))
    else:
        results = [run(name) for name in suites.REPORT_SUITES]
    return _emit_suites(results, cfg)


COMMANDS = {
    "wpoly": cmd_wpoly,
    "gram": cmd_gram,
    "trajectory": cmd_trajectory,
    "master": cmd_master,
    "eigencheck": cmd_eigencheck,
    "fourier": cmd_fourier,
    "parseval": cmd_parseval,
    "report": cmd_report,
}


def main(argv: list[str] | None = None, environ=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args, environ)
        return COMMANDS[args.command](args, cfg)
    except ToleranceNotMet as exc:
        print(f"tolerance not met: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (UsageError, SequivError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
