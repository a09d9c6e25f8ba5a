"""Classical flows of the standard and the alternative Hamiltonian.

Standard:     H(x, p)   = p**2/2 + V(x)
Alternative:  H'(x, p') = sqrt(2 V(x)) * cosh(p')

Both generate the same trajectories x(t) (for the oscillator, x'' + x = 0)
once initial data are matched through ``xdot = sqrt(2V) sinh(p')``.
Units are m = omega = 1.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import DomainError, SingularityStop, StepFailure
from .numerics import DEFAULT_ODE, OdeSpec, ode_solve

STANDARD = "standard"
ALTERNATIVE = "alternative"

# sign branches of sqrt(2V) in the alternative Hamiltonian; only "plus" is
# developed, the others exist for smoke-level experiments
BRANCHES = ("plus", "minus", "signed")


@dataclass(frozen=True)
class Potential:
    """``V(x) + a`` with its derivative; ``a`` is the optional lower shift."""

    eval: Callable[[float], float]
    deriv: Callable[[float], float]
    a: float = 0.0

    def __post_init__(self):
        if self.a < 0:
            raise ValueError("lower shift a must be nonnegative")

    def __call__(self, x):
        return self.eval(x) + self.a

    def d(self, x):
        return self.deriv(x)


def oscillator(a: float = 0.0) -> Potential:
    """``V(x) = x**2/2 + a``."""
    return Potential(lambda x: 0.5 * x * x, lambda x: x, a)


def constant_potential(c: float) -> Potential:
    return Potential(lambda x: c + 0.0 * x, lambda x: 0.0 * x)


@dataclass(frozen=True)
class HamiltonianModel:
    kind: str
    potential: Potential
    branch: str = "plus"

    def __post_init__(self):
        if self.kind not in (STANDARD, ALTERNATIVE):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.branch not in BRANCHES:
            raise ValueError(f"unknown branch {self.branch!r}")

    @classmethod
    def standard(cls, potential: Potential) -> "HamiltonianModel":
        return cls(STANDARD, potential)

    @classmethod
    def alternative(cls, potential: Potential, branch: str = "plus") -> "HamiltonianModel":
        return cls(ALTERNATIVE, potential, branch)

    def beta(self, x):
        """Prefactor ``+-sqrt(2V(x))`` of ``cosh p'`` for the chosen branch."""
        v = self.potential(x)
        if np.any(np.asarray(v) < 0):
            raise DomainError(f"V(x) < 0 at x={x!r}; the alternative model needs V >= 0")
        root = np.sqrt(2.0 * v)
        if self.branch == "minus":
            return -root
        if self.branch == "signed":
            return np.sign(x) * root
        return root

    def dbeta(self, x):
        # beta * beta' = V'
        b = self.beta(x)
        if np.any(b == 0):
            raise DomainError(f"sqrt(2V) vanishes at x={x!r}; the alternative flow is singular there")
        return self.potential.d(x) / b


def eval_hamiltonian(model: HamiltonianModel, x, momentum):
    if model.kind == STANDARD:
        return 0.5 * momentum * momentum + model.potential(x)
    return model.beta(x) * np.cosh(momentum)


def hamilton_rhs(model: HamiltonianModel, x, momentum) -> tuple[float, float]:
    """``(dx/dt, dmomentum/dt)`` from Hamilton's equations."""
    if model.kind == STANDARD:
        return momentum, -model.potential.d(x)
    return model.beta(x) * math.sinh(momentum), -model.dbeta(x) * math.cosh(momentum)


@dataclass(frozen=True)
class PhaseTrajectory:
    """Samples ``(t, x, momentum)`` with the model's Hamiltonian logged per sample.

    ``b`` is the initial value of the Hamiltonian. When the alternative flow
    runs into the ``V = 0`` singularity the trajectory is cut short and
    ``stopped`` is set; ``t_valid`` is the last trustworthy time.
    """

    model: HamiltonianModel
    t: np.ndarray
    x: np.ndarray
    momentum: np.ndarray
    conserved: np.ndarray
    b: float
    stopped: bool = False

    @property
    def t_valid(self) -> float:
        return float(self.t[-1])

    @property
    def residual_strip(self) -> np.ndarray:
        return self.conserved - self.b

    def conservation_error(self) -> float:
        return float(np.max(np.abs(self.residual_strip)))

    def in_strip(self) -> bool:
        """``0 < x <= b`` (or ``b <= x < 0``) at every sample."""
        if self.b > 0:
            return bool(np.all((self.x > 0) & (self.x <= self.b)))
        return bool(np.all((self.x < 0) & (self.x >= self.b)))

    def velocity(self) -> np.ndarray:
        return np.array([hamilton_rhs(self.model, x, m)[0] for x, m in zip(self.x, self.momentum)])

    def x_at(self, times) -> np.ndarray:
        """Cubic Hermite interpolation of x(t) using the exact velocities."""
        if len(self.t) == 1:
            return np.full(np.shape(times), self.x[0])
        t, x, v = self.t, self.x, self.velocity()
        if t[-1] < t[0]:
            t, x, v = t[::-1], x[::-1], v[::-1]
        return CubicHermiteSpline(t, x, v)(times)

    COLUMNS = ("t", "x", "momentum", "conserved", "residual_strip")

    def rows(self):
        for row in zip(self.t, self.x, self.momentum, self.conserved, self.residual_strip):
            yield tuple(float(v) for v in row)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for row in self.rows():
            w.writerow([format(v, ".16e") for v in row])
        if self.stopped:
            w.writerow(["# SingularityStop", format(self.t_valid, ".16e")])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "model": self.model.kind,
                "b": self.b,
                "stopped": self.stopped,
                "t_valid": self.t_valid,
                "columns": list(self.COLUMNS),
                "samples": [list(r) for r in self.rows()],
            }
        )


def integrate_flow(
    model: HamiltonianModel,
    x0: float,
    momentum0: float,
    t_span: tuple[float, float],
    spec: OdeSpec = DEFAULT_ODE,
    eps_strip: float = 1e-8,
    drift_guard: float = 1e-6,
    on_singularity: str = "stop",
) -> PhaseTrajectory:
    """Integrate Hamilton's equations of ``model``.

    For the alternative model the run halts once ``|sqrt(2V(x))|`` would drop
    to ``eps_strip``, or once the Hamiltonian drifts from its initial value by
    more than ``drift_guard * max(1, |b|)`` (the stepper can no longer resolve
    the approach to the singularity). With ``on_singularity="raise"`` a
    :class:`SingularityStop` carrying the last valid time is raised instead
    of returning the truncated trajectory.
    """
    if on_singularity not in ("stop", "raise"):
        raise ValueError("on_singularity must be 'stop' or 'raise'")
    b = float(eval_hamiltonian(model, x0, momentum0))

    def rhs(t, y):
        return np.array(hamilton_rhs(model, y[0], y[1]))

    stop = None
    if model.kind == ALTERNATIVE:
        if abs(model.beta(x0)) <= eps_strip:
            raise DomainError("initial point sits on the V = 0 singularity")
        drift_limit = drift_guard * max(1.0, abs(b))

        def stop(t, y):
            x, m = y
            if not (np.isfinite(x) and np.isfinite(m)):
                return True
            if 2.0 * model.potential(x) <= eps_strip * eps_strip:
                return True
            return abs(eval_hamiltonian(model, x, m) - b) > drift_limit

    try:
        path = ode_solve(rhs, (x0, momentum0), t_span, spec, stop=stop)
    except StepFailure as exc:
        path = exc.path
    xs, ms = path.y[:, 0], path.y[:, 1]
    conserved = np.array([eval_hamiltonian(model, x, m) for x, m in zip(xs, ms)])
    traj = PhaseTrajectory(model, path.t, xs, ms, conserved, b, stopped=path.stopped)
    if traj.stopped and on_singularity == "raise":
        raise SingularityStop(f"flow reached the V = 0 singularity; valid until t={traj.t_valid:.6g}", traj.t_valid)
    return traj


def matched_momentum(potential: Potential, x0: float, v0: float) -> float:
    """Alternative-model momentum for velocity ``v0``: ``arcsinh(v0/sqrt(2V(x0)))``."""
    v = potential(x0)
    if v <= 0:
        raise DomainError("V(x0) must be positive to match initial data")
    return math.asinh(v0 / math.sqrt(2.0 * v))


@dataclass(frozen=True)
class SEquivalenceReport:
    standard: PhaseTrajectory
    alternative: PhaseTrajectory
    window: tuple[float, float]
    max_x_deviation: float
    standard_conservation: float
    alternative_conservation: float
    max_sigma_deviation: float  # max |H' - sqrt(2H)|
    max_sigma_ratio_deviation: float  # max |H'/sqrt(2H) - 1|
    strip_ok: bool
    truncated: bool


def s_equivalence_report(
    potential: Potential,
    x0: float,
    v0: float,
    t_span: tuple[float, float],
    spec: OdeSpec = DEFAULT_ODE,
) -> SEquivalenceReport:
    """Run both models from matched initial data and compare them.

    The comparison window ends at the earlier of the two valid times; if the
    alternative flow hit its singularity, ``truncated`` is True.
    """
    p0 = matched_momentum(potential, x0, v0)
    std = integrate_flow(HamiltonianModel.standard(potential), x0, v0, t_span, spec)
    alt = integrate_flow(HamiltonianModel.alternative(potential), x0, p0, t_span, spec)
    n = min(len(std.t), len(alt.t))
    t0 = float(t_span[0])
    if np.array_equal(std.t[:n], alt.t[:n]):
        times = std.t[:n]
        x_std, x_alt = std.x[:n], alt.x[:n]
        h_std, h_alt = std.conserved[:n], alt.conserved[:n]
    else:
        # adaptive grids differ: sample the alternative flow at standard times
        end = min(std.t_valid, alt.t_valid, key=lambda s: abs(s - t0))
        keep = np.abs(std.t - t0) <= abs(end - t0)
        times = std.t[keep]
        x_std, h_std = std.x[keep], std.conserved[keep]
        x_alt = alt.x_at(times)
        order = np.argsort(alt.t)
        h_alt = np.interp(times, alt.t[order], alt.conserved[order])
    sigma = np.sqrt(2.0 * h_std)
    return SEquivalenceReport(
        standard=std,
        alternative=alt,
        window=(t0, float(times[-1])),
        max_x_deviation=float(np.max(np.abs(x_std - x_alt))),
        standard_conservation=std.conservation_error(),
        alternative_conservation=alt.conservation_error(),
        max_sigma_deviation=float(np.max(np.abs(h_alt - sigma))),
        max_sigma_ratio_deviation=float(np.max(np.abs(h_alt / sigma - 1.0))),
        strip_ok=alt.in_strip(),
        truncated=alt.stopped,
    )


@dataclass(frozen=True)
class LagrangianValue:
    value: float  # L'
    momentum: float  # p' = dL'/dxdot
    legendre: float  # xdot*p' - L', should equal sqrt(2V) cosh p'


def lagrangian_prime(potential: Potential, x: float, xdot: float) -> LagrangianValue:
    """``L' = xdot*arcsinh(xdot/sqrt(2V)) - sqrt(xdot**2 + 2V)``.

    This is the s-equivalent Lagrangian of ``xdot**2/2 - V`` for
    ``Sigma(H) = sqrt(2H)``, with the integration constant chosen at zero
    velocity.
    """
    v = potential(x)
    if v <= 0:
        raise DomainError(f"V(x) must be positive, got {v!r} at x={x!r}")
    beta = math.sqrt(2.0 * v)
    pp = math.asinh(xdot / beta)
    value = xdot * pp - math.hypot(xdot, beta)
    return LagrangianValue(value, pp, xdot * pp - value)


@dataclass(frozen=True)
class MomentumRelationReport:
    spread_by_x: dict = field(default_factory=dict)  # x -> max-min of p' - p over the p grid
    max_spread: float = 0.0


def momentum_relation_check(potential: Potential, xs: Sequence[float], ps: Sequence[float]) -> MomentumRelationReport:
    """Spread of ``p'(x, p) - p`` across ``ps`` at each fixed ``x``.

    A point transformation would force ``p' - p = f(x)``, i.e. zero spread.
    """
    spreads = {}
    ps = np.asarray(ps, dtype=float)
    for x in xs:
        v = potential(x)
        if v <= 0:
            raise DomainError(f"V(x) must be positive at x={x!r}")
        d = np.arcsinh(ps / math.sqrt(2.0 * v)) - ps
        spreads[float(x)] = float(d.max() - d.min())
    return MomentumRelationReport(spreads, max(spreads.values()) if spreads else 0.0)
