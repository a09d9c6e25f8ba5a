"""Quadrature and ODE engines used by the rest of the package.

Two quadrature routes are offered:

* ``integrate_real_line`` integrates over a truncated window ``[-T, T]``
  with adaptive Gauss-Kronrod panels, or (``scheme="transformed-compact"``)
  maps the real line onto ``(-pi, pi)`` with ``sinh p = tan(theta/2)``.
* ``integrate_theta`` integrates over ``(-pi, pi)``. The endpoints are
  smoothed with the cubic map ``theta = pi*u*(3 - u**2)/2`` so integrands
  with ``cos(theta/2)**(-1/2)`` endpoint behaviour become analytic in ``u``
  and the Kronrod error estimate stays trustworthy.

``integrate_folded`` is a fixed composite Gauss-Legendre rule evaluated in
``np.longdouble``. It folds the real line onto ``[0, T]`` so odd integrands
cancel exactly, and is meant for integrals whose answer must be resolved
below double-precision roundoff of the integrand scale.

Integrands are called with a scalar argument and may return a scalar or a
numpy array (vector-valued integrals share one adaptive mesh).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad_vec, solve_ivp

from .errors import NonFiniteSample, StepFailure, ToleranceNotMet

SCHEMES = ("truncated-adaptive", "transformed-compact")
ODE_METHODS = ("rk4-fixed", "rk45-adaptive")

# pi to extended precision; np.pi would shift sech(pi*x) weights by ~1e-16
PI_EXTENDED = np.longdouble("3.14159265358979323846264338327950288")


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature settings.

    Parameters
    ----------
    scheme : str
        ``"truncated-adaptive"`` or ``"transformed-compact"``.
    truncation : float
        half-width of the integration window in the untransformed variable.
    abs_tol : float
        target absolute error.
    max_subdivisions : int
        panel budget for the adaptive refinement.
    decay_rate : float
        assumed exponential decay rate of the integrand beyond the window,
        used to bound the discarded tails.
    """

    scheme: str = "truncated-adaptive"
    truncation: float = 60.0
    abs_tol: float = 1e-10
    max_subdivisions: int = 5000
    decay_rate: float = 0.5

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")
        if not self.truncation > 0:
            raise ValueError("truncation must be positive")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be a positive integer")
        if not self.decay_rate > 0:
            raise ValueError("decay_rate must be positive")

    def replace(self, **changes) -> "QuadratureSpec":
        fields = {**self.__dict__, **changes}
        return QuadratureSpec(**fields)


@dataclass(frozen=True)
class OdeSpec:
    """ODE stepper settings: ``method`` in ODE_METHODS, ``step`` for the
    fixed-step method, ``abs_tol`` for the adaptive controller."""

    method: str = "rk4-fixed"
    step: float = 1e-3
    abs_tol: float = 1e-8

    def __post_init__(self):
        if self.method not in ODE_METHODS:
            raise ValueError(f"unknown ODE method {self.method!r}")
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")


DEFAULT_QUAD = QuadratureSpec()
DEFAULT_ODE = OdeSpec()


def _checked(f: Callable) -> Callable:
    def wrapped(x):
        y = f(x)
        if not np.all(np.isfinite(y)):
            raise NonFiniteSample(f"integrand is not finite at {x!r}")
        return y

    return wrapped


def _adaptive(f, a, b, spec: QuadratureSpec, points=None):
    value, err, info = quad_vec(
        _checked(f),
        a,
        b,
        epsabs=spec.abs_tol,
        epsrel=0.0,
        norm="max",
        limit=spec.max_subdivisions,
        points=points,
        full_output=True,
    )
    if info.status != 0:
        raise ToleranceNotMet(
            f"quadrature did not reach abs_tol={spec.abs_tol:g} "
            f"(estimate {err:.3g}, status {info.status})",
            value=value,
            err_estimate=err,
        )
    return value, float(err)


def theta_to_p(theta):
    """Inverse of the substitution ``sinh p = tan(theta/2)``."""
    return np.arcsinh(np.tan(np.asarray(theta) / 2.0))


def p_to_theta(p):
    return 2.0 * np.arctan(np.sinh(np.asarray(p)))


def integrate_theta(g: Callable, spec: QuadratureSpec = DEFAULT_QUAD):
    """Integrate ``g`` over ``(-pi, pi)``.

    ``g`` may have integrable ``cos(theta/2)**(-1/2)`` singularities at the
    endpoints; it is never evaluated exactly at ``+-pi``.

    Returns
    -------
    value, err_estimate
    """

    def smoothed(u):
        theta = 0.5 * math.pi * u * (3.0 - u * u)
        jac = 1.5 * math.pi * (1.0 - u * u)
        return g(theta) * jac

    value, err = _adaptive(smoothed, -1.0, 1.0, spec, points=(0.0,))
    if err > spec.abs_tol:
        raise ToleranceNotMet("theta quadrature above tolerance", value, err)
    return np.asarray(value, dtype=complex)[()], err


def integrate_real_line(f: Callable, spec: QuadratureSpec = DEFAULT_QUAD):
    """Integrate ``f`` over the real line.

    The integrand must decay at least like ``exp(-r|p|)`` with
    ``r = spec.decay_rate``. For the truncated scheme the returned error
    estimate includes the tail bound ``max(|f(T)|, |f(-T)|)/r``, valid under
    that decay assumption.

    Returns
    -------
    value, err_estimate
        ``value`` is complex (or a complex array for vector integrands).
    """
    if spec.scheme == "transformed-compact":

        def g(theta):
            c = np.cos(theta / 2.0)
            return f(float(theta_to_p(theta))) / (2.0 * c)

        return integrate_theta(g, spec)

    t = spec.truncation
    points = np.linspace(-t, t, 9)[1:-1]
    value, err = _adaptive(f, -t, t, spec, points=points)
    edge = max(np.max(np.abs(_checked(f)(t))), np.max(np.abs(_checked(f)(-t))))
    err += float(edge) / spec.decay_rate
    if err > spec.abs_tol:
        raise ToleranceNotMet(
            f"error estimate {err:.3g} exceeds abs_tol={spec.abs_tol:g}; "
            "widen the truncation window",
            value=value,
            err_estimate=err,
        )
    return np.asarray(value, dtype=complex)[()], err


def integrate_interval(f: Callable, a: float, b: float, spec: QuadratureSpec = DEFAULT_QUAD):
    """Adaptive quadrature on a finite interval (compactly supported integrands)."""
    value, err = _adaptive(f, a, b, spec)
    return np.asarray(value, dtype=complex)[()], err


@functools.lru_cache(maxsize=8)
def gauss_legendre_extended(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on ``[-1, 1]`` in ``np.longdouble``.

    Double-precision nodes from numpy are polished by Newton steps on the
    Legendre recurrence carried out in extended precision.
    """
    x, _ = np.polynomial.legendre.leggauss(order)
    x = x.astype(np.longdouble)

    def legendre(x):
        p0, p1 = np.ones_like(x), x.copy()
        for k in range(2, order + 1):
            p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
        return p1, order * (x * p1 - p0) / (x * x - 1)

    for _ in range(3):
        p, dp = legendre(x)
        x = x - p / dp
    _, dp = legendre(x)
    w = 2 / ((1 - x * x) * dp * dp)
    return x, w


def _folded_sum(f, truncation, panels, order):
    x, w = gauss_legendre_extended(order)
    edges = np.linspace(np.longdouble(0), np.longdouble(truncation), panels + 1)
    mid = (edges[:-1] + edges[1:]) / 2
    half = (edges[1:] - edges[:-1]) / 2
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    values = np.asarray(f(nodes)) + np.asarray(f(-nodes))
    if not np.all(np.isfinite(values)):
        raise NonFiniteSample("integrand is not finite on the folded grid")
    return values @ weights


def integrate_folded(f: Callable, truncation: float, panels: int = 60, order: int = 20):
    """``int_{-T}^{T} f`` as ``int_0^T (f(x) + f(-x)) dx`` in extended precision.

    Parameters
    ----------
    f : callable
        vectorised integrand; receives a 1-D ``np.longdouble`` array of nodes
        and returns an array whose last axis runs over the nodes.
    truncation : float
        window half-width ``T``; the integrand must be negligible beyond it.
    panels, order : int
        number of equal panels and Gauss-Legendre points per panel.

    Returns
    -------
    value, err_estimate
        ``value`` keeps ``np.longdouble`` precision; ``err_estimate`` has the
        same shape and holds the change when the panel count is doubled.
    """
    coarse = _folded_sum(f, truncation, panels, order)
    fine = _folded_sum(f, truncation, 2 * panels, order)
    return fine, np.abs(fine - coarse).astype(float)


@dataclass(frozen=True)
class OdePath:
    """Sampled ODE solution; ``y[k]`` is the state at ``t[k]``.

    ``stopped`` is True when a stop predicate ended the run before
    ``t_span[1]``; ``t[-1]`` is then the last valid time.
    """

    t: np.ndarray
    y: np.ndarray
    stopped: bool = False

    @property
    def t_last(self) -> float:
        return float(self.t[-1])


def _rk4(rhs, y0, t0, t1, step, stop):
    n = max(1, int(math.ceil((t1 - t0) / step - 1e-9)))
    h = (t1 - t0) / n
    ts = [t0]
    ys = [np.array(y0, dtype=float)]
    y = ys[0]
    for k in range(n):
        t = t0 + k * h
        k1 = np.asarray(rhs(t, y))
        k2 = np.asarray(rhs(t + h / 2, y + h / 2 * k1))
        k3 = np.asarray(rhs(t + h / 2, y + h / 2 * k2))
        k4 = np.asarray(rhs(t + h, y + h * k3))
        y_new = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t_new = t0 + (k + 1) * h
        if not np.all(np.isfinite(y_new)) or (stop is not None and stop(t_new, y_new)):
            return OdePath(np.array(ts), np.array(ys), stopped=True)
        ts.append(t_new)
        ys.append(y_new)
        y = y_new
    return OdePath(np.array(ts), np.array(ys))


def ode_solve(
    rhs: Callable,
    y0,
    t_span: tuple[float, float],
    spec: OdeSpec = DEFAULT_ODE,
    stop: Callable | None = None,
) -> OdePath:
    """Integrate ``y' = rhs(t, y)`` for a two-component state.

    Parameters
    ----------
    rhs : callable
        ``rhs(t, y) -> array of shape (2,)``.
    y0 : pair of float
    t_span : (t0, t1)
        ``t1 < t0`` integrates backwards.
    spec : OdeSpec
    stop : callable, optional
        ``stop(t, y) -> bool``; when it returns True for a new state the run
        ends and the path is flagged ``stopped`` (the offending state is not
        kept).

    Raises
    ------
    StepFailure
        if the adaptive controller cannot continue.
    """
    t0, t1 = map(float, t_span)
    y0 = np.asarray(y0, dtype=float)
    if t1 == t0:
        return OdePath(np.array([t0]), y0[None, :].copy())
    if spec.method == "rk4-fixed":
        if t1 > t0:
            return _rk4(rhs, y0, t0, t1, spec.step, stop)
        return _rk4_backward(rhs, y0, t0, t1, spec.step, stop)

    events = None
    if stop is not None:

        def event(t, y):
            return -1.0 if stop(t, y) else 1.0

        event.terminal = True
        events = [event]
    sol = solve_ivp(
        rhs,
        (t0, t1),
        y0,
        method="RK45",
        rtol=spec.abs_tol,
        atol=spec.abs_tol,
        events=events,
    )
    path_t = sol.t
    path_y = sol.y.T
    if sol.status == -1:
        t_last = float(path_t[-1])
        partial = OdePath(np.asarray(path_t), np.asarray(path_y), stopped=True)
        raise StepFailure(f"adaptive step underflow near t={t_last:.6g}: {sol.message}", t_last, partial)
    stopped = sol.status == 1
    if stopped and len(path_t) > 1 and stop(path_t[-1], path_y[-1]):
        path_t, path_y = path_t[:-1], path_y[:-1]
    return OdePath(np.asarray(path_t), np.asarray(path_y), stopped=stopped)


def _rk4_backward(rhs, y0, t0, t1, step, stop):
    # integrate in reversed time s = -t
    def rev(s, y):
        return -np.asarray(rhs(-s, y))

    rev_stop = None if stop is None else (lambda s, y: stop(-s, y))
    path = _rk4(rev, y0, -t0, -t1, step, rev_stop)
    return OdePath(-path.t, path.y, path.stopped)
