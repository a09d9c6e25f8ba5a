"""Verification suites: each returns named checks with value, tolerance and verdict.

The command-line driver renders these; every suite is deterministic (random
samples come from a seeded generator).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import classical, exactpoly, fourier, master, spectral
from .errors import SequivError, ToleranceNotMet
from .numerics import DEFAULT_QUAD, OdeSpec

SEED = 20240611


@dataclass(frozen=True)
class Check:
    name: str
    value: float  # observed error (or defect)
    tol: float
    err_estimate: float = 0.0
    at_least: bool = False  # pass when value >= tol instead of value <= tol

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.value):
            return False
        return self.value >= self.tol if self.at_least else self.value <= self.tol


@dataclass
class SuiteResult:
    suite: str
    checks: list[Check] = field(default_factory=list)

    def add(self, name, value, tol, err_estimate=0.0, at_least=False):
        self.checks.append(Check(name, float(value), float(tol), float(err_estimate), at_least))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _fail_as_check(result: SuiteResult, name: str, exc: SequivError, tol: float):
    est = getattr(exc, "err_estimate", None)
    result.add(f"{name} ({type(exc).__name__})", math.inf, tol, est if est is not None else math.inf)


W_TABLE = {
    0: [1],
    1: [0, 2],
    2: [-1, 0, 4],
    3: [0, -10, 0, 8],
    4: [9, 0, -56, 0, 16],
}


def wpoly_suite(n_max: int = 30) -> SuiteResult:
    """Low-order table and exact recurrence replay."""
    r = SuiteResult("wpoly")
    for n, coeffs in W_TABLE.items():
        got = exactpoly.w_poly(n).real_coeffs()
        r.add(f"W_{n} table", 0.0 if list(got) == [Fraction(c) for c in coeffs] else 1.0, 0.0)
    x = exactpoly.X
    bad = 0
    for n in range(1, n_max):
        lhs = exactpoly.w_poly(n + 1) + exactpoly.w_poly(n - 1).scale(n * n)
        bad += lhs != (x * exactpoly.w_poly(n)).scale(2)
    r.add(f"recurrence n<{n_max}", float(bad), 0.0)
    return r


def _random_real_poly(rng, degree):
    coeffs = [Fraction(int(rng.integers(-50, 51)), int(rng.integers(1, 20))) for _ in range(degree + 1)]
    return exactpoly.GaussianRationalPoly(coeffs)


def identities_suite(n_max: int = 30, samples: int = 100) -> SuiteResult:
    """Exact eigen-identity, ladder action and commutator (zero tolerance)."""
    r = SuiteResult("identities")
    bad_h = bad_r = 0
    for n in range(n_max + 1):
        w = exactpoly.w_poly(n)
        bad_h += exactpoly.apply_h(w) != w.scale(Fraction(2 * n + 1, 2))
        bad_r += exactpoly.apply_R(w) != exactpoly.w_poly(n + 1)
    r.add(f"h W_n = (n+1/2) W_n, n<={n_max}", float(bad_h), 0.0)
    r.add(f"R W_n = W_n+1, n<={n_max}", float(bad_r), 0.0)
    rng = np.random.default_rng(SEED)
    bad_c = sum(not exactpoly.commutator_residual(_random_real_poly(rng, int(rng.integers(0, 13)))).is_zero for _ in range(samples))
    r.add(f"[h,R]=R on {samples} random polynomials", float(bad_c), 0.0)
    return r


def gram_suite(n_max: int = 8, tol: float = 1e-8, spec=DEFAULT_QUAD) -> SuiteResult:
    """W-orthogonality, weight integral and the generating-function product."""
    r = SuiteResult("gram")
    try:
        g, err = fourier.gram_w_estimate(n_max, spec)
    except SequivError as exc:
        _fail_as_check(r, "gram_w", exc, tol)
        return r
    for n, k, value, expected, abs_err, est in fourier.gram_rows(g, err):
        if n == k:
            r.add(f"gram[{n},{k}] rel", abs_err / expected, tol, est / expected)
        else:
            r.add(f"gram[{n},{k}] abs", abs_err, tol, est)
    for label, theta in (("0", 0.0), ("pi/6", math.pi / 6), ("pi/4", math.pi / 4), ("pi/3", math.pi / 3)):
        r.add(f"weight_integral theta={label}", abs(fourier.weight_integral(theta, spec) - 1 / math.cos(theta)), 1e-10)
    rng = np.random.default_rng(SEED)
    for s, t in rng.uniform(-0.9, 0.9, size=(10, 2)):
        r.add(f"ww s={s:.4f} t={t:.4f}", abs(fourier.ww_generating_check(s, t, spec) - 1 / (1 - s * t)), tol)
    return r


def eigencheck_suite(gamma: float = 0.5, n_range=(-4, 4), tol: float = 1e-6) -> SuiteResult:
    """Finite-difference eigen-residuals of ``Psi_{2n+gamma}``."""
    r = SuiteResult("eigencheck")
    grid = spectral.default_grid()
    for n in range(n_range[0], n_range[1] + 1):
        lam = 2 * n + gamma
        r.add(f"residual lambda={lam:g}", spectral.eigen_residual(lam, grid), tol)
    return r


def spectrum_suite(tol: float = 1e-8, fd_tol: float = 1e-6, spec=DEFAULT_QUAD) -> SuiteResult:
    r = SuiteResult("spectrum")
    grid = spectral.default_grid()
    for lam in (0.0, 0.5, 1.0, 1.5, 2.0, 2.5):
        r.add(f"residual lambda={lam:g}", spectral.eigen_residual(lam, grid), fd_tol)
    rng = np.random.default_rng(SEED)
    for lam, mu in rng.uniform(-6.0, 6.0, size=(20, 2)):
        value, err = spectral.inner_product(lam, mu, spec)
        r.add(f"inner({lam:.4f},{mu:.4f})", abs(value - spectral.sinc_inner_product(lam, mu)), tol, err)
    for gamma in (0.0, 0.5, 1.0, 1.5):
        g, err = spectral.gram_matrix(spectral.BasisSpec(gamma, -8, 8), spec)
        r.add(f"basis gram gamma={gamma:g}", np.max(np.abs(g - np.eye(len(g)))), tol, err)
    return r


def extensions_suite(tol: float = 1e-8) -> SuiteResult:
    r = SuiteResult("extensions")
    for gamma in (0.0, 0.5, 1.0, 1.5):
        for n in (-2, 0, 3):
            ratio = spectral.extension_boundary_ratio(2 * n + gamma)
            r.add(f"arg ratio lambda={2 * n + gamma:g}", spectral.phase_distance(np.angle(ratio), math.pi * gamma), tol)
    pairs = (
        (spectral.bump(), spectral.bump(0.3, 1.5, 0.7)),
        (spectral.bump(-1.0, 2.5, -1.1), spectral.bump(0.5, 2.0, 2.0)),
    )
    for i, (f, g) in enumerate(pairs):
        d = spectral.symmetry_defect(f, g, support=(-3.5, 2.5))
        r.add(f"symmetry defect bump pair {i}", abs(d.defect), tol, d.err_estimate)
    return r


def gaussian(p):
    return np.exp(-p * p)


def parseval_suite(gamma: float = 0.5, N: int = 64, tol: float = 1e-6, spec=DEFAULT_QUAD) -> SuiteResult:
    r = SuiteResult("parseval")
    res = spectral.parseval_check(gaussian, gamma, N, spec)
    r.add(f"defect N={N} gamma={gamma:g}", abs(res.defect), tol, res.coeff_err + res.norm_err)
    r.add("norm vs sqrt(pi/2)", abs(res.norm_sq - math.sqrt(math.pi / 2)), 1e-10, res.norm_err)
    return r


def fourier_suite(n_max: int = 3, tol: float = 1e-8, spec=DEFAULT_QUAD) -> SuiteResult:
    r = SuiteResult("fourier")
    xs = np.linspace(-3.0, 3.0, 25)
    rows = fourier.transform_table(range(-n_max, n_max + 1), xs, spec)
    for n in range(-n_max, n_max + 1):
        sel = [row for row in rows if row.n == n]
        r.add(
            f"transform n={n}",
            max(max(row.abs_error for row in sel), max(abs(row.numeric_im) for row in sel)),
            tol,
            sel[0].err_estimate,
        )
    bad = sum(not fourier.nonlocal_action(n, 0.3).exact for n in range(-21, 21))
    r.add("nonlocal H exact factor |n+1/2|<=20.5", float(bad), 0.0)
    for x, t in ((0.0, 0.0), (0.7, 0.3), (-1.5, -0.6), (2.0, 0.8)):
        rep = fourier.residue_contour_check(x, t, spec=spec)
        r.add(f"contour x={x:g} t={t:g}", rep.max_error, tol, rep.err_estimate + rep.side_bound)
    return r


def counterexample_suite(a: float = 1.0, tol: float = 1e-6) -> SuiteResult:
    r = SuiteResult("counterexample")
    mults = []
    for p in (0.0, 1.0, 2.0):
        rep = fourier.shifted_counterexample(a, p)
        mults.append(rep.multiplier_fd)
        r.add(f"multiplier p={p:g}", rep.error, tol)
        r.add(f"transform of Phi_1/2(x-a) p={p:g}", rep.transform_error, 1e-8)
        r.add(f"Phi_1/2(x+a) solves eigen equation p={p:g}", rep.x1_residual, 1e-10)
    spread = max(abs(m - n) for m in mults for n in mults)
    r.add("multiplier spread over p (must exceed tol)", spread, 100 * tol, at_least=True)
    return r


def classical_suite(tol: float = 1e-6, conservation_tol: float = 1e-8, spec: OdeSpec | None = None) -> SuiteResult:
    r = SuiteResult("classical")
    rep = classical.s_equivalence_report(classical.oscillator(), 1.0, 0.0, (0.0, 1.4), spec or OdeSpec())
    r.add("x(t) agreement", rep.max_x_deviation, tol)
    r.add("H conservation", rep.standard_conservation, conservation_tol)
    r.add("H' conservation", rep.alternative_conservation, conservation_tol)
    r.add("H' = sqrt(2H)", rep.max_sigma_deviation, conservation_tol)
    r.add("strip 0 < x <= b", 0.0 if rep.strip_ok else 1.0, 0.0)
    return r


MASTER_CASES = ((0.0, 0.5), (0.0, 1.0), (0.0, 2.0), (1.0, 0.0))


def master_suite(tol: float = 1e-6, alpha_tol: float = 1e-10) -> SuiteResult:
    r = SuiteResult("master")
    for offset, x in MASTER_CASES:
        pot = classical.oscillator(offset)
        sol = master.solve_master(master.MasterProblem(pot, x))
        err = np.max(np.abs(sol.h - master.closed_form_hprime(pot, x, sol.p)))
        r.add(f"closed form V=x^2/2+{offset:g} x={x:g}", err, tol)
        r.add(f"alpha V=x^2/2+{offset:g} x={x:g}", abs(sol.alpha_coeff), alpha_tol)
    return r


REPORT_SUITES = (
    "wpoly",
    "identities",
    "gram",
    "spectrum",
    "extensions",
    "parseval",
    "fourier",
    "counterexample",
    "classical",
    "master",
)


def run_named(name: str, tol: float | None = None, gamma: float = 0.5, n_max: int | None = None) -> SuiteResult:
    """Run one report suite with its acceptance defaults, optionally overriding ``tol``."""

    def pick(default):
        return default if tol is None else tol

    try:
        if name == "wpoly":
            return wpoly_suite(30 if n_max is None else n_max)
        if name == "identities":
            return identities_suite(30 if n_max is None else n_max)
        if name == "gram":
            return gram_suite(8 if n_max is None else n_max, pick(1e-8))
        if name == "spectrum":
            return spectrum_suite(pick(1e-8))
        if name == "extensions":
            return extensions_suite(pick(1e-8))
        if name == "parseval":
            return parseval_suite(gamma, 64, pick(1e-6))
        if name == "fourier":
            return fourier_suite(3, pick(1e-8))
        if name == "counterexample":
            return counterexample_suite(1.0, pick(1e-6))
        if name == "classical":
            return classical_suite(pick(1e-6))
        if name == "master":
            return master_suite(pick(1e-6))
    except ToleranceNotMet as exc:
        r = SuiteResult(name)
        _fail_as_check(r, name, exc, pick(0.0))
        return r
    raise ValueError(f"unknown suite {name!r}")
