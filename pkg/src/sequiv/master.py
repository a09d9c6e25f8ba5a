"""The master equation for the alternative Hamiltonian H'(x, p').

For ``L = xdot**2/2 - V`` and ``Sigma(H) = sqrt(2H)`` the general equation

    d2H'/dp'2 * (dH'/dH * d2L/dxdot2) = 1

reduces at fixed ``x`` to the linear ODE ``H'' = H'`` in ``p'``. With
``dH'/dp' = 0`` at ``p' = 0`` (zero momentum iff zero velocity) and
``H'(x, 0) = sqrt(2V(x))`` (``H = V`` at rest) the solution is
``sqrt(2V(x)) * cosh(p')``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .classical import Potential, PhaseTrajectory, lagrangian_prime
from .errors import DivisionNearZero, DomainError
from .numerics import OdeSpec, ode_solve

MASTER_ODE = OdeSpec(method="rk4-fixed", step=1e-3, abs_tol=1e-8)

# central stencils, 8th order
_D1 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
_D2 = np.array([-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560])
# central stencils, 4th order
_D1_4 = np.array([1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12])
_D2_4 = np.array([-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12])


@dataclass(frozen=True)
class MasterProblem:
    potential: Potential
    x: float
    p_max: float = 5.0
    grid: int = 5000  # rk4 steps per half-axis

    def __post_init__(self):
        if not self.p_max > 0:
            raise ValueError("p_max must be positive")
        if self.grid < 1:
            raise ValueError("grid must be a positive integer")


@dataclass(frozen=True)
class MasterSolution:
    p: np.ndarray
    h: np.ndarray  # H'(x, p')
    dh: np.ndarray  # dH'/dp'
    alpha_coeff: float
    beta_coeff: float

    def structure_residual(self) -> float:
        """sup |H' - (alpha sinh p' + beta cosh p')| over the samples."""
        fit = self.alpha_coeff * np.sinh(self.p) + self.beta_coeff * np.cosh(self.p)
        return float(np.max(np.abs(self.h - fit)))

    def to_csv(self, potential: Potential, x: float) -> str:
        closed = closed_form_hprime(potential, x, self.p)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["p_prime", "h_prime", "dh_prime", "closed_form", "abs_error"])
        for row in zip(self.p, self.h, self.dh, closed, np.abs(self.h - closed)):
            w.writerow([format(float(v), ".16e") for v in row])
        return buf.getvalue()


def fit_general_solution(p: np.ndarray, h: np.ndarray, dh: np.ndarray) -> tuple[float, float]:
    """``(alpha, beta)`` of ``alpha sinh + beta cosh`` from value and slope at ``p' = 0``."""
    zero = np.flatnonzero(p == 0.0)
    if zero.size == 0:
        raise ValueError("samples must include p' = 0")
    i = zero[0]
    return float(dh[i]), float(h[i])


def integrate_master(h0: float, dh0: float, p_max: float, spec: OdeSpec = MASTER_ODE):
    """Integrate ``H'' = H`` from ``p' = 0`` to both ``+p_max`` and ``-p_max``.

    Returns sorted arrays ``(p, H, dH/dp)``.
    """

    def rhs(t, y):
        return np.array([y[1], y[0]])

    fwd = ode_solve(rhs, (h0, dh0), (0.0, p_max), spec)
    bwd = ode_solve(rhs, (h0, dh0), (0.0, -p_max), spec)
    p = np.concatenate([bwd.t[:0:-1], fwd.t])
    y = np.concatenate([bwd.y[:0:-1], fwd.y])
    return p, y[:, 0], y[:, 1]


def solve_master(problem: MasterProblem, spec: OdeSpec | None = None) -> MasterSolution:
    """Solve the reduced master equation at fixed ``x``.

    Initial data: ``H'(x, 0) = sqrt(2V(x))`` and ``dH'/dp'(x, 0) = 0``.
    """
    v = problem.potential(problem.x)
    if v <= 0:
        raise DomainError(f"V(x) must be positive, got {v!r}")
    if spec is None:
        spec = OdeSpec(method="rk4-fixed", step=problem.p_max / problem.grid)
    p, h, dh = integrate_master(math.sqrt(2.0 * v), 0.0, problem.p_max, spec)
    alpha, beta = fit_general_solution(p, h, dh)
    return MasterSolution(p, h, dh, alpha, beta)


def closed_form_hprime(potential: Potential, x: float, p_prime):
    """``sqrt(2V(x)) * cosh(p')``."""
    v = potential(x)
    if v < 0:
        raise DomainError(f"V(x) < 0 at x={x!r}")
    return math.sqrt(2.0 * v) * np.cosh(p_prime)


def _stride_for(spacing: float, target: float) -> int:
    return max(1, int(round(target / spacing)))


def _uniform_spacing(p: np.ndarray) -> float:
    d = np.diff(p)
    if d.size == 0 or not np.allclose(d, d[0], rtol=1e-9, atol=1e-12):
        raise ValueError("samples must lie on a uniform grid")
    return float(d[0])


def _apply_stencil(values: np.ndarray, stencil: np.ndarray, stride: int) -> tuple[np.ndarray, slice]:
    half = len(stencil) // 2
    n = len(values)
    lo, hi = half * stride, n - half * stride
    if hi <= lo:
        raise ValueError("not enough samples for the derivative stencil")
    out = np.zeros(hi - lo, dtype=values.dtype)
    for j, c in enumerate(stencil):
        if c:
            off = (j - half) * stride
            out += c * values[lo + off : hi + off]
    return out, slice(lo, hi)


@dataclass(frozen=True)
class MasterResidual:
    general: float  # max |H'' * (dH'/dH * d2L/dxdot2) - 1|
    reduced: float  # max |H'' - H'| / H'


def master_residual_general(
    p,
    hprime,
    dhprime=None,
    dsigma_dh: Callable | None = None,
    d2l_dxdot2: float = 1.0,
    eps: float = 1e-12,
    spacing: float = 0.05,
) -> MasterResidual:
    """Residual of the general master equation on sampled ``H'(p')``.

    ``d2H'/dp'2`` is taken with an 8th-order central stencil at a stride
    giving roughly ``spacing`` between stencil points; when ``dhprime``
    samples are supplied, the first derivative of those is used instead.
    ``dsigma_dh`` maps H' values to ``dH'/dH``; the default ``1/H'``
    corresponds to ``Sigma = sqrt(2H)``.
    """
    p = np.asarray(p, dtype=float)
    h = np.asarray(hprime, dtype=float)
    stride = _stride_for(_uniform_spacing(p), spacing)
    step = (p[1] - p[0]) * stride
    if dhprime is not None:
        d2, sl = _apply_stencil(np.asarray(dhprime, dtype=float), _D1, stride)
        d2 /= step
    else:
        d2, sl = _apply_stencil(h, _D2, stride)
        d2 /= step * step
    hs = h[sl]
    if np.any(np.abs(hs) < eps):
        raise DivisionNearZero("H' is too close to zero (V(x) near 0?)")
    if dsigma_dh is None:
        dsig = 1.0 / hs
    else:
        dsig = np.asarray(dsigma_dh(hs), dtype=float)
    general = np.abs(d2 * dsig * d2l_dxdot2 - 1.0)
    reduced = np.abs(d2 - hs) / np.abs(hs)
    return MasterResidual(float(general.max()), float(reduced.max()))


def _el_expression(lagr: Callable, x, xd, xdd, dx: float = 1e-4, dv: float = 2e-4):
    # dL/dx - xdot d2L/dxdot dx - xddot d2L/dxdot2, partials by central differences
    dl_dx = (lagr(x + dx, xd) - lagr(x - dx, xd)) / (2 * dx)
    d2l_dv2 = (lagr(x, xd + dv) - 2 * lagr(x, xd) + lagr(x, xd - dv)) / (dv * dv)
    d2l_dvdx = (
        lagr(x + dv, xd + dv) - lagr(x + dv, xd - dv) - lagr(x - dv, xd + dv) + lagr(x - dv, xd - dv)
    ) / (4 * dv * dv)
    return dl_dx - xd * d2l_dvdx - xdd * d2l_dv2


@dataclass(frozen=True)
class EulerLagrangeReport:
    t: np.ndarray
    el: np.ndarray  # Euler-Lagrange expression of L
    el_prime: np.ndarray  # Euler-Lagrange expression of L'
    factor: np.ndarray  # dSigma/dH = 1/sqrt(2H)
    max_el: float
    max_el_prime: float
    max_ratio_deviation: float  # max |EL'/EL / factor - 1| where EL is not negligible


def euler_lagrange_proportionality(potential: Potential, trajectory, spacing: float = 0.01) -> EulerLagrangeReport:
    """Evaluate both Euler-Lagrange expressions along a sampled path.

    ``trajectory`` is a :class:`PhaseTrajectory` or a pair ``(t, x)`` on a
    uniform time grid. Velocities and accelerations come from 4th-order
    finite differences in ``t``. On solutions both expressions vanish; on
    other paths ``EL' = EL / sqrt(2H)``.
    """
    if isinstance(trajectory, PhaseTrajectory):
        t, x = trajectory.t, trajectory.x
    else:
        t, x = (np.asarray(a, dtype=float) for a in trajectory)
    stride = _stride_for(abs(_uniform_spacing(t)), spacing)
    dt = (t[1] - t[0]) * stride
    xd, sl = _apply_stencil(x, _D1_4, stride)
    xd /= dt
    xdd, _ = _apply_stencil(x, _D2_4, stride)
    xdd /= dt * dt
    ts, xs = t[sl], x[sl]

    def lag(xx, vv):
        return 0.5 * vv * vv - potential(xx)

    def lag_prime(xx, vv):
        return np.array([lagrangian_prime(potential, a, b).value for a, b in zip(np.atleast_1d(xx), np.atleast_1d(vv))])

    el = _el_expression(lag, xs, xd, xdd)
    el_p = _el_expression(lag_prime, xs, xd, xdd)
    energy = 0.5 * xd * xd + potential(xs)
    factor = 1.0 / np.sqrt(2.0 * energy)
    big = np.abs(el) > 1e-3 * max(np.max(np.abs(el)), 1e-300)
    if np.max(np.abs(el)) < 1e-6 or not np.any(big):
        ratio_dev = float("nan")
    else:
        ratio_dev = float(np.max(np.abs(el_p[big] / el[big] / factor[big] - 1.0)))
    return EulerLagrangeReport(
        ts, el, el_p, factor, float(np.max(np.abs(el))), float(np.max(np.abs(el_p))), ratio_dev
    )
