"""Position representation of the momentum eigenfunctions.

The Fourier transform ``Phi_lam(x) = (2 pi)**-0.5 * int Psi_lam(p) e^{ipx} dp``
has closed forms at half-integer labels:

    Phi_{1/2}(x)    = e^{pi x/2} / cosh(pi x) = 2 e^{-pi x/2} / (1 + e^{-2 pi x})
    Phi_{n+1/2}(x)  = Phi_{1/2}(x) W_n(x) / n!                       (n >= 0)
    Phi_{-m-1/2}(x) = (-1)**m Phi_{-1/2}(x) W_m(x) / m!,  Phi_{-1/2}(x) = Phi_{1/2}(-x)

The quantized oscillator Hamiltonian acts nonlocally,

    H'_Q Phi(x) = (i/2)(1/2 - ix) Phi(x + i) - (i/2)(1/2 + ix) Phi(x - i),

and since ``Phi_{+-1/2}(x + i) = -+i Phi_{+-1/2}(x)`` the action on the family
reduces to the exact polynomial operator :func:`sequiv.exactpoly.apply_h`.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, ToleranceNotMet
from .exactpoly import GaussianRationalPoly, apply_h, w_eval, w_poly
from .numerics import DEFAULT_QUAD, PI_EXTENDED, QuadratureSpec, integrate_folded, integrate_real_line
from .spectral import apply_K_fd, psi
from .tables import format_float, table_to_csv, table_to_json

SQRT_2PI = math.sqrt(2.0 * math.pi)


def phi_half(x):
    """``Phi_{1/2}`` on the real axis, written to avoid overflow for large ``|x|``."""
    x = np.asarray(x, dtype=float)
    a = np.abs(x)
    out = 2.0 * np.exp(0.5 * math.pi * x - math.pi * a) / (1.0 + np.exp(-2.0 * math.pi * a))
    return out[()] if out.ndim == 0 else out


def phi_half_complex(z):
    """``e^{pi z/2} / cosh(pi z)`` for complex ``z``."""
    z = np.asarray(z, dtype=complex)
    out = np.exp(0.5 * math.pi * z) / np.cosh(math.pi * z)
    return out[()] if out.ndim == 0 else out


def phi_factor(n: int) -> tuple[int, GaussianRationalPoly]:
    """Split ``Phi_{n+1/2} = Phi_{s/2}(x) * P(x)`` with ``s = +-1`` and exact ``P``."""
    if n >= 0:
        return 1, w_poly(n).scale(Fraction(1, math.factorial(n)))
    m = -n - 1
    return -1, w_poly(m).scale(Fraction((-1) ** m, math.factorial(m)))


def phi_closed(n: int, x):
    """``Phi_{n+1/2}(x)`` from the closed form; ``x`` may be a scalar or array."""
    sign, _ = phi_factor(n)
    m = n if n >= 0 else -n - 1
    xs = np.asarray(x, dtype=float)
    w = np.array([w_eval(m, float(v)) for v in xs.ravel()]).reshape(xs.shape)
    base = phi_half(sign * xs)
    out = base * w / math.factorial(m)
    if n < 0 and m % 2:
        out = -out
    return out[()] if np.ndim(out) == 0 else out


def fourier_transform_num(lam: float, x, spec: QuadratureSpec = DEFAULT_QUAD):
    """``(2 pi)**-0.5 * int Psi_lam(p) e^{ipx} dp`` by quadrature.

    ``x`` may be an array; all points share one adaptive mesh.

    Returns
    -------
    value, err_estimate
    """
    xs = np.asarray(x, dtype=float)

    def integrand(p):
        return psi(lam, p) * np.exp(1j * p * xs) / SQRT_2PI

    return integrate_real_line(integrand, spec)


@dataclass(frozen=True)
class TransformRow:
    n: int
    x: float
    numeric_re: float
    numeric_im: float
    closed: float
    abs_error: float
    err_estimate: float


TRANSFORM_COLUMNS = ("n", "x", "numeric_re", "numeric_im", "closed", "abs_error", "err_estimate")


def transform_table(ns, xs, spec: QuadratureSpec = DEFAULT_QUAD) -> list[TransformRow]:
    """Compare the numerical transform with :func:`phi_closed` on a grid."""
    xs = np.asarray(xs, dtype=float)
    rows = []
    for n in ns:
        values, err = fourier_transform_num(n + 0.5, xs, spec)
        closed = phi_closed(n, xs)
        for x, v, c in zip(xs, np.atleast_1d(values), np.atleast_1d(closed)):
            rows.append(TransformRow(int(n), float(x), v.real, v.imag, float(c), abs(v - c), err))
    return rows


def _check_t(t):
    if not abs(t) < 1:
        raise DomainError(f"generating functions need |t| < 1, got {t!r}")


def psi_generating(p, t):
    """``sum_n Psi_{n+1/2}(p) t**n`` in closed form; ``p`` and ``t`` may be complex."""
    _check_t(t)
    p = np.asarray(p, dtype=complex)
    num = (1 + 1j) * np.exp(0.5 * p)
    den = (1 - 1j * t) + 1j * (1 + 1j * t) * np.exp(p)
    out = num / den / math.sqrt(math.pi)
    return out[()] if out.ndim == 0 else out


def w_generating(x, t):
    """``(1 + t**2)**-0.5 * exp(2x arctan t) = sum_n W_n(x) t**n / n!``."""
    _check_t(t)
    if isinstance(t, complex) or np.iscomplexobj(x):
        return np.exp(2 * np.asarray(x) * np.arctan(t)) / np.sqrt(1 + t * t)
    return np.exp(2 * np.asarray(x, dtype=float) * math.atan(t)) / math.sqrt(1 + t * t)


def generating_phi(x, t):
    """``Phi(x, t) = Phi_{1/2}(x) W(x, t)``, the transform of :func:`psi_generating`."""
    _check_t(t)
    return phi_half(x) * w_generating(x, t)


def taylor_coefficients(func, n_max: int, radius: float = 0.5, points: int = 64) -> np.ndarray:
    """Taylor coefficients ``0..n_max`` of ``func(t)`` at 0 by the trapezoid rule
    on the circle ``|t| = radius`` (Cauchy's formula)."""
    if points <= n_max:
        raise ValueError("need more circle points than coefficients")
    theta = 2 * np.pi * np.arange(points) / points
    samples = np.array([func(radius * cmath.exp(1j * th)) for th in theta])
    coeffs = np.fft.fft(samples) / points
    return coeffs[: n_max + 1] / radius ** np.arange(n_max + 1)


@dataclass(frozen=True)
class NonlocalAction:
    """``H'_Q Phi_{n+1/2} = Phi_{s/2} * factor`` next to the expected eigen-action."""

    n: int
    factor: GaussianRationalPoly
    expected_factor: GaussianRationalPoly
    value: float
    expected_value: float

    @property
    def exact(self) -> bool:
        return self.factor == self.expected_factor


def nonlocal_action(n: int, x: float) -> NonlocalAction:
    """Apply ``H'_Q`` to ``Phi_{n+1/2}`` in decomposed form.

    With ``Phi_{s/2}(x + i) = -s i Phi_{s/2}(x)`` the shifted values become
    ``Phi_{s/2}(x)`` times the exact polynomial ``s * h(P)``; only the final
    multiplication by ``Phi_{s/2}(x)`` is done in floating point.
    """
    sign, poly = phi_factor(n)
    factor = apply_h(poly) if sign > 0 else apply_h(poly).scale(-1)
    expected = poly.scale(Fraction(2 * n + 1, 2))
    base = float(phi_half(sign * x))
    return NonlocalAction(
        n,
        factor,
        expected,
        base * float(factor(Fraction(x)).re),
        base * float(expected(Fraction(x)).re),
    )


def apply_nonlocal_H(n: int, x: float) -> float:
    """``(H'_Q Phi_{n+1/2})(x)``; equals ``(n + 1/2) Phi_{n+1/2}(x)``."""
    return nonlocal_action(n, x).value


def apply_nonlocal_H_callable(phi, x):
    """``(i/2)(1/2 - ix) phi(x + i) - (i/2)(1/2 + ix) phi(x - i)`` for an
    analytic ``phi`` that accepts complex arguments."""
    x = np.asarray(x, dtype=float)
    return 0.5j * (0.5 - 1j * x) * phi(x + 1j) - 0.5j * (0.5 + 1j * x) * phi(x - 1j)


def apply_nonlocal_general(phi, sqrt_v, x):
    """Symmetrised ``sqrt(V/2) cos(d/dx) + cos(d/dx) sqrt(V/2)`` on analytic ``phi``.

    ``sqrt_v`` is an analytic branch of ``sqrt(V)``. Expanding the
    symmetrisation gives the prefactor ``1/(2 sqrt 2)``; for ``V = x**2/2``
    with ``sqrt_v(z) = z/sqrt(2)`` this coincides with
    :func:`apply_nonlocal_H_callable`. Intended for smoke evaluation only.
    """
    x = np.asarray(x, dtype=float)
    c = 1.0 / (2.0 * math.sqrt(2.0))
    up = c * (sqrt_v(x) + sqrt_v(x + 1j)) * phi(x + 1j)
    down = c * (sqrt_v(x) + sqrt_v(x - 1j)) * phi(x - 1j)
    return up + down


@dataclass(frozen=True)
class CounterexampleReport:
    a: float
    p: float
    multiplier_exact: complex  # K Psi / Psi from the analytic derivative
    multiplier_fd: complex  # K Psi / Psi from the finite-difference K
    expected: float  # 1/2 + a cosh p
    transform_error: float  # |FT of Phi_{1/2}(x - a) at p - Psi_{1/2}(p) e^{-ipa}|
    x1_residual: float  # max |H'_Q Phi - Phi/2| for Phi(x) = Phi_{1/2}(x + a) on sampled x

    @property
    def error(self) -> float:
        return max(abs(self.multiplier_exact - self.expected), abs(self.multiplier_fd - self.expected))

    def to_json(self) -> str:
        d = asdict(self)
        for k in ("multiplier_exact", "multiplier_fd"):
            d[k] = [d[k].real, d[k].imag]
        return json.dumps(d)


def _shifted_psi(a):
    return lambda p: psi(0.5, p) * np.exp(-1j * p * a)


def shifted_counterexample(
    a: float,
    p: float,
    step: float = 1e-3,
    xs=None,
    spec: QuadratureSpec = DEFAULT_QUAD,
) -> CounterexampleReport:
    """K-action on ``Psi(p) = Psi_{1/2}(p) e^{-ipa}`` and the position-space check.

    ``Psi`` is the transform of ``Phi_{1/2}(x - a)``; it satisfies
    ``K Psi = (1/2 + a cosh p) Psi``. Both ``Phi_{1/2}(x + a)`` and
    ``Phi_{1/2}(x - a)`` solve the nonlocal equation with eigenvalue 1/2,
    which is checked for ``Phi_{1/2}(x + a)`` on ``xs``.
    """
    f = _shifted_psi(a)
    val = f(p)
    # Psi_{1/2}' = Psi_{1/2} (-tanh p / 2 - i/(2 cosh p))
    dval = val * (-0.5 * math.tanh(p) - 0.5j / math.cosh(p) - 1j * a)
    k_exact = 0.5j * (math.sinh(p) * val + 2 * math.cosh(p) * dval)
    grid = p + step * np.arange(-4, 5)
    k_fd = apply_K_fd(f(grid), grid).values[4]

    def position(x):
        return phi_half(x - a) * np.exp(-1j * p * x) / SQRT_2PI

    ft, _ = integrate_real_line(position, spec.replace(truncation=spec.truncation + abs(a)))
    if xs is None:
        xs = np.linspace(-3.0, 3.0, 25)
    shifted = lambda z: phi_half_complex(z + a)  # noqa: E731
    x1 = apply_nonlocal_H_callable(shifted, xs) - 0.5 * shifted(np.asarray(xs, dtype=complex))
    return CounterexampleReport(
        float(a),
        float(p),
        complex(k_exact / val),
        complex(k_fd / val),
        0.5 + a * math.cosh(p),
        float(abs(ft - val)),
        float(np.max(np.abs(x1))),
    )


def _normalized_w(x, n_max: int) -> np.ndarray:
    # W_n/n! from (n+1) w_{n+1} = 2x w_n - n w_{n-1}; the rescaled recurrence
    # keeps all terms O(1) and avoids the cancellation of the monomial form
    out = [np.ones_like(x), 2 * x]
    for n in range(1, n_max):
        out.append((2 * x * out[n] - n * out[n - 1]) / (n + 1))
    return np.array(out[: n_max + 1])


GRAM_MAX = 12


def gram_w_estimate(n_max: int, spec: QuadratureSpec = DEFAULT_QUAD, panels: int = 120):
    """``int W_n W_k / cosh(pi x) dx`` for ``0 <= n, k <= n_max``.

    The normalised integrand ``(W_n/n!)(W_k/k!) sech(pi x)`` is integrated with
    :func:`sequiv.numerics.integrate_folded` in extended precision, then scaled
    back by ``n! k!``.

    Returns
    -------
    gram, err_estimate
        float matrices; ``err_estimate`` is in the same (unnormalised) units.
    """
    if not 0 <= n_max <= GRAM_MAX:
        raise DomainError(f"gram_w supports 0 <= n_max <= {GRAM_MAX}, got {n_max}")

    def integrand(x):
        w = _normalized_w(x, n_max)
        return w[:, None, :] * w[None, :, :] / np.cosh(PI_EXTENDED * x)

    value, err = integrate_folded(integrand, spec.truncation, panels=panels)
    scale = np.array([math.factorial(n) for n in range(n_max + 1)], dtype=np.longdouble)
    outer = np.outer(scale, scale)
    edge = np.max(np.abs(integrand(np.array([spec.truncation], dtype=np.longdouble))))
    err_matrix = (err.astype(np.longdouble) + edge) * outer
    return np.asarray(value * outer, dtype=float), np.asarray(err_matrix, dtype=float)


def gram_w(n_max: int, spec: QuadratureSpec = DEFAULT_QUAD) -> np.ndarray:
    """Gram matrix of ``W_0..W_{n_max}`` under the weight ``1/cosh(pi x)``.

    Raises
    ------
    ToleranceNotMet
        if an entry's error estimate exceeds ``spec.abs_tol * n! k!``.
    """
    gram, err = gram_w_estimate(n_max, spec)
    scale = np.array([math.factorial(n) for n in range(n_max + 1)], dtype=float)
    if np.any(err > spec.abs_tol * np.outer(scale, scale)):
        raise ToleranceNotMet("Gram quadrature above tolerance", gram, float(err.max()))
    return gram


GRAM_COLUMNS = ("n", "k", "value", "expected", "abs_error", "err_estimate")


def gram_rows(gram: np.ndarray, err: np.ndarray):
    n_max = gram.shape[0] - 1
    for n in range(n_max + 1):
        for k in range(n_max + 1):
            expected = float(math.factorial(n) ** 2) if n == k else 0.0
            yield (n, k, gram[n, k], expected, abs(gram[n, k] - expected), err[n, k])


def _window_for(rate: float, spec: QuadratureSpec) -> QuadratureSpec:
    # |integrand| <= 2 exp(-rate |x|); pick T so the tail bound 2 e^{-rate T}/rate
    # is 1e-3 of the tolerance
    t = math.log(2e3 / (spec.abs_tol * rate)) / rate
    return spec.replace(truncation=max(t, 1.0), decay_rate=rate)


def _sech_weighted_exp(theta: float):
    def f(x):
        a = abs(x)
        return 2.0 * math.exp(2.0 * x * theta - math.pi * a) / (1.0 + math.exp(-2.0 * math.pi * a))

    return f


def weight_integral(theta: float, spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """``int e^{2 x theta} / cosh(pi x) dx`` (equal to ``1/cos(theta)``)."""
    if not abs(theta) < math.pi / 2:
        raise DomainError(f"weight_integral needs |theta| < pi/2, got {theta!r}")
    value, _ = integrate_real_line(_sech_weighted_exp(theta), _window_for(math.pi - 2 * abs(theta), spec))
    return float(value.real)


def ww_generating_check(s: float, t: float, spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """``int W(x, s) W(x, t) / cosh(pi x) dx`` by quadrature (equal to ``1/(1 - st)``)."""
    _check_t(s)
    _check_t(t)
    theta = math.atan(s) + math.atan(t)
    norm = 1.0 / math.sqrt((1 + s * s) * (1 + t * t))
    weighted = _sech_weighted_exp(0.0)

    def f(x):
        return float(w_generating(x, s) * w_generating(x, t)) * weighted(x)

    value, _ = integrate_real_line(f, _window_for(math.pi - 2 * abs(theta), spec.replace(abs_tol=spec.abs_tol * norm)))
    return float(value.real)


@dataclass(frozen=True)
class ContourReport:
    x: float
    t: float
    a: float
    periodicity_error: float  # |Psi(p + 2 pi i, t) / Psi(p, t) + 1| at sampled p
    pole: complex
    pole_residual: float  # |denominator at the pole|
    residue_formula: complex
    residue_numeric: complex  # small-circle integral / (2 pi i)
    residue_error: float
    lower_side: complex  # int_{-a}^{a} of the integrand on the real axis
    contour_error: float  # |lower (1 + e^{-2 pi x}) - 2 pi i res|
    generating_error: float  # |lower - Phi(x, t)|
    side_bound: float  # bound on each vertical side
    err_estimate: float

    @property
    def max_error(self) -> float:
        return max(self.periodicity_error, self.residue_error, self.contour_error, self.generating_error)

    def to_json(self) -> str:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, complex):
                d[k] = [v.real, v.imag]
        return json.dumps(d)


def residue_contour_check(
    x: float,
    t: float,
    a: float = 80.0,
    spec: QuadratureSpec = DEFAULT_QUAD,
    probes=(0.3, -1.2, 2.5),
) -> ContourReport:
    """Numerical check of the contour evaluation of ``Phi(x, t)``.

    The integrand is ``Psi(p, t) e^{ipx} / sqrt(2 pi)`` on the rectangle with
    corners ``-a``, ``a``, ``a + 2 pi i``, ``-a + 2 pi i``.
    """
    _check_t(t)

    def integrand(p):
        return psi_generating(p, t) * np.exp(1j * p * x) / SQRT_2PI

    probes = np.asarray(probes, dtype=complex)
    ratios = psi_generating(probes + 2j * math.pi, t) / psi_generating(probes, t)
    periodicity = float(np.max(np.abs(ratios + 1.0)))

    pole = 1j * (0.5 * math.pi - 2.0 * math.atan(t))
    den = (1 - 1j * t) + 1j * (1 + 1j * t) * cmath.exp(pole)
    res_formula = -1j / math.pi * math.exp(-0.5 * math.pi * x) * math.exp(2 * x * math.atan(t)) / math.sqrt(1 + t * t)

    radius = 0.25 * min(abs(pole.imag), 2 * math.pi - abs(pole.imag), 1.0)
    m = 128
    phases = np.exp(2j * np.pi * np.arange(m) / m)
    res_numeric = complex(np.mean(integrand(pole + radius * phases) * radius * phases))

    lower, err = integrate_real_line(integrand, spec.replace(truncation=a))
    lower = complex(lower)
    identity = lower * (1 + math.exp(-2 * math.pi * x))
    sides = np.linspace(0.0, 2 * math.pi, 65)
    side_bound = 2 * math.pi * float(
        max(np.max(np.abs(integrand(a + 1j * sides))), np.max(np.abs(integrand(-a + 1j * sides))))
    )
    return ContourReport(
        float(x),
        float(t),
        float(a),
        periodicity,
        pole,
        abs(den),
        res_formula,
        res_numeric,
        abs(res_numeric - res_formula),
        lower,
        abs(identity - 2j * math.pi * res_formula),
        abs(lower - float(generating_phi(x, t))),
        side_bound,
        float(err),
    )


def transform_rows_csv(rows: list[TransformRow]) -> str:
    return table_to_csv(TRANSFORM_COLUMNS, [tuple(asdict(r).values()) for r in rows])


def transform_rows_json(rows: list[TransformRow]) -> str:
    return table_to_json(TRANSFORM_COLUMNS, [tuple(asdict(r).values()) for r in rows])


__all__ = [
    "phi_half",
    "phi_half_complex",
    "phi_closed",
    "fourier_transform_num",
    "transform_table",
    "psi_generating",
    "w_generating",
    "generating_phi",
    "taylor_coefficients",
    "nonlocal_action",
    "apply_nonlocal_H",
    "apply_nonlocal_H_callable",
    "apply_nonlocal_general",
    "shifted_counterexample",
    "gram_w",
    "gram_w_estimate",
    "weight_integral",
    "ww_generating_check",
    "residue_contour_check",
    "format_float",
]
