"""Momentum-space operator K = (i/2)(d/dp cosh p + cosh p d/dp) and its eigenfunctions.

    K f = (i/2) (sinh(p) f + 2 cosh(p) f')
    Psi_lam(p) = exp(-i lam arctan(sinh p)) / sqrt(pi cosh p),   K Psi_lam = lam Psi_lam

For each 0 <= gamma < 2 the family {Psi_{2n+gamma}}_{n in Z} is an
orthonormal basis of L^2(R); gamma labels the self-adjoint extension through
the boundary ratio lim_{p->-inf} / lim_{p->+inf} of sqrt(cosh p) Psi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import GridTooCoarse
from .numerics import DEFAULT_QUAD, QuadratureSpec, integrate_interval, integrate_real_line, integrate_theta

INV_SQRT_PI = 1.0 / math.sqrt(math.pi)


@dataclass(frozen=True)
class EigenFunctionSpec:
    """Label ``lam`` of ``Psi_lam``; ``gamma = lam mod 2`` names its basis."""

    lam: float

    @property
    def gamma(self) -> float:
        return self.lam % 2.0

    @property
    def normalization(self) -> float:
        return INV_SQRT_PI


@dataclass(frozen=True)
class BasisSpec:
    gamma: float = 0.5
    n_min: int = -8
    n_max: int = 8

    def __post_init__(self):
        if not 0.0 <= self.gamma < 2.0:
            raise ValueError("gamma must lie in [0, 2)")
        if self.n_max < self.n_min:
            raise ValueError("empty n range")

    @property
    def ns(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    @property
    def labels(self) -> np.ndarray:
        return 2.0 * self.ns + self.gamma


def gudermannian(p):
    """``arctan(sinh p)``, principal branch, range (-pi/2, pi/2)."""
    return np.arctan(np.sinh(p))


def inv_sqrt_cosh(p):
    a = np.abs(p)
    return np.exp(-a / 2.0) * np.sqrt(2.0 / (1.0 + np.exp(-2.0 * a)))


def psi(lam, p):
    """Normalised eigenfunction ``Psi_lam(p)`` (vectorised in ``p``)."""
    if isinstance(lam, EigenFunctionSpec):
        lam = lam.lam
    p = np.asarray(p, dtype=float)
    return INV_SQRT_PI * inv_sqrt_cosh(p) * np.exp(-1j * lam * gudermannian(p))


def psi_derivative(lam, p):
    """Exact ``dPsi_lam/dp = Psi_lam * (-tanh(p)/2 - i lam / cosh p)``."""
    p = np.asarray(p, dtype=float)
    return psi(lam, p) * (-0.5 * np.tanh(p) - 1j * lam / np.cosh(p))


def psi_half_integer(n: int, p):
    """``Psi_{n+1/2}`` as the rational expression in ``e^p``:
    ``(i (1 - i e^p)/(1 + i e^p))**n * (1 + i) e^{p/2} / (1 + i e^p) / sqrt(pi)``."""
    e = np.exp(np.asarray(p, dtype=float))
    phase = 1j * (1 - 1j * e) / (1 + 1j * e)
    return INV_SQRT_PI * phase**n * (1 + 1j) * np.sqrt(e) / (1 + 1j * e)


@dataclass(frozen=True)
class IdentityReport:
    first: float  # max deviation of the Psi_{1/2} rational identity
    second: float  # max deviation of the phase identity
    powers: float  # max deviation of Psi_{n+1/2} rational form vs direct, over n


def identity_checks(p_grid, n_max: int = 6) -> IdentityReport:
    """Compare the rational-in-``e^p`` forms with the direct definitions."""
    p = np.asarray(p_grid, dtype=float)
    e = np.exp(p)
    lhs1 = inv_sqrt_cosh(p) * np.exp(-0.5j * gudermannian(p))
    rhs1 = (1 + 1j) / (1 + 1j * e) * np.sqrt(e)
    lhs2 = np.exp(-1j * gudermannian(p))
    rhs2 = 1j * (1 - 1j * e) / (1 + 1j * e)
    powers = max(float(np.max(np.abs(psi_half_integer(n, p) - psi(n + 0.5, p)))) for n in range(n_max + 1))
    return IdentityReport(float(np.max(np.abs(lhs1 - rhs1))), float(np.max(np.abs(lhs2 - rhs2))), powers)


def _d1_order4(f: np.ndarray, h: float, stride: int = 1) -> np.ndarray:
    out = np.full(f.shape, np.nan, dtype=complex)
    s = stride
    out[2 * s : -2 * s] = (f[: -4 * s] - 8 * f[s : -3 * s] + 8 * f[3 * s : -s] - f[4 * s :]) / (12 * h * s)
    return out


@dataclass(frozen=True)
class KAction:
    """Result of applying K on a grid; rows outside ``valid`` are meaningless."""

    p: np.ndarray
    values: np.ndarray
    valid: np.ndarray
    err_estimate: float


def apply_K_fd(f, p_grid, tol: float | None = None) -> KAction:
    """``(i/2)(sinh p f + 2 cosh p f')`` with a 4th-order centred derivative.

    The two rows at each end cannot be centred and are flagged invalid. The
    error estimate compares the step-h and step-2h derivatives (Richardson,
    ``|D_2h - D_h|/15``) weighted by ``cosh p``; with ``tol`` set,
    :class:`GridTooCoarse` is raised when the estimate exceeds it.
    """
    p = np.asarray(p_grid, dtype=float)
    f = np.asarray(f, dtype=complex)
    h = p[1] - p[0]
    if not np.allclose(np.diff(p), h, rtol=1e-9, atol=1e-14):
        raise ValueError("apply_K_fd needs a uniform grid")
    df = _d1_order4(f, h)
    df2 = _d1_order4(f, h, stride=2)
    kf = 0.5j * (np.sinh(p) * f + 2.0 * np.cosh(p) * df)
    valid = np.zeros(p.shape, dtype=bool)
    valid[2:-2] = True
    both = ~np.isnan(df2)
    est = float(np.max(np.cosh(p[both]) * np.abs(df2[both] - df[both]))) / 15.0 if np.any(both) else math.inf
    if tol is not None and est > tol:
        raise GridTooCoarse(f"estimated finite-difference error {est:.3g} exceeds {tol:g}")
    kf[~valid] = np.nan
    return KAction(p, kf, valid, est)


def eigen_residual(lam: float, p_grid) -> float:
    """``max |(K - lam) Psi_lam|`` on the interior of ``p_grid``."""
    p = np.asarray(p_grid, dtype=float)
    f = psi(lam, p)
    k = apply_K_fd(f, p)
    return float(np.max(np.abs(k.values[k.valid] - lam * f[k.valid])))


def default_grid(half_width: float = 20.0, step: float = 1e-3) -> np.ndarray:
    n = int(round(2 * half_width / step))
    return np.linspace(-half_width, half_width, n + 1)


def sinc_inner_product(lam: float, mu: float) -> float:
    """Closed form of ``(Psi_lam, Psi_mu)``: ``sin(d pi/2)/(d pi/2)``, ``d = lam - mu``."""
    d = (lam - mu) * math.pi / 2.0
    return 1.0 if d == 0 else math.sin(d) / d


def inner_product(lam: float, mu: float, spec: QuadratureSpec = DEFAULT_QUAD):
    """``int conj(Psi_lam) Psi_mu dp`` by quadrature; returns ``(value, err)``."""
    return integrate_real_line(lambda p: np.conj(psi(lam, p)) * psi(mu, p), spec)


def gram_matrix(basis: BasisSpec, spec: QuadratureSpec = DEFAULT_QUAD):
    """Matrix of ``(Psi_a, Psi_b)`` over the labels of ``basis``; returns ``(G, err)``."""
    labels = basis.labels
    m = len(labels)

    def integrand(p):
        v = psi(labels, p)
        return np.outer(np.conj(v), v).ravel()

    value, err = integrate_real_line(integrand, spec)
    return np.asarray(value).reshape(m, m), err


@dataclass(frozen=True)
class ParsevalResult:
    gamma: float
    ns: np.ndarray
    coefficients: np.ndarray  # (f, Psi_{2n+gamma}) for n in ns
    partial_sums: np.ndarray  # partial_sums[N] = sum_{|n| <= N} |c_n|^2
    norm_sq: float
    coeff_err: float
    norm_err: float

    @property
    def partial_sum(self) -> float:
        return float(self.partial_sums[-1])

    @property
    def defect(self) -> float:
        return self.norm_sq - self.partial_sum


def theta_coefficients(f: Callable, gamma: float, ns: Sequence[int], spec: QuadratureSpec = DEFAULT_QUAD):
    """``(f, Psi_{2n+gamma})`` for all ``n`` in ``ns`` via ``sinh p = tan(theta/2)``:

        c_n = 1/(2 sqrt(pi)) int_{-pi}^{pi} conj(f(p(theta))) cos(theta/2)^(-1/2)
              exp(-i gamma theta/2) exp(-i n theta) dtheta
    """
    ns = np.asarray(ns)

    def integrand(theta):
        c = math.cos(theta / 2.0)
        if c <= 0.0:
            return np.zeros(ns.shape, dtype=complex)
        p = math.asinh(math.tan(theta / 2.0))
        base = np.conj(f(p)) * c**-0.5 * np.exp(-0.5j * gamma * theta)
        return base * np.exp(-1j * ns * theta)

    value, err = integrate_theta(integrand, spec)
    return np.asarray(value) * (0.5 * INV_SQRT_PI), err * 0.5 * INV_SQRT_PI


def parseval_check(f: Callable, gamma: float, N: int, spec: QuadratureSpec = DEFAULT_QUAD) -> ParsevalResult:
    """Partial sums of ``sum_{|n|<=N} |(f, Psi_{2n+gamma})|^2`` against ``||f||^2``."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    ns = np.arange(-N, N + 1)
    coeffs, cerr = theta_coefficients(f, gamma, ns, spec)
    mags = np.abs(coeffs) ** 2
    partial = np.array([mags[np.abs(ns) <= k].sum() for k in range(N + 1)])
    norm_sq, nerr = integrate_real_line(lambda p: abs(f(p)) ** 2, spec)
    return ParsevalResult(gamma, ns, coeffs, partial, float(np.real(norm_sq)), cerr, nerr)


def extension_boundary_ratio(lam: float, p_probe: float = 30.0) -> complex:
    """Ratio of ``sqrt(cosh p) Psi_lam(p)`` at ``-p_probe`` to its value at ``+p_probe``."""
    left = psi(lam, -p_probe) / inv_sqrt_cosh(-p_probe)
    right = psi(lam, p_probe) / inv_sqrt_cosh(p_probe)
    return complex(left / right)


def extension_label(ratio: complex) -> float:
    """``gamma`` in [0, 2) with ``ratio = exp(i pi gamma)``."""
    return (np.angle(ratio) / math.pi) % 2.0


def phase_distance(a: float, b: float) -> float:
    """Distance between two angles modulo 2 pi."""
    d = (a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def bump(center: float = 0.0, half_width: float = 2.0, phase: float = 0.0) -> Callable:
    """Smooth compactly supported test function ``exp(-1/(1 - u^2)) e^{i phase p}``."""

    def f(p):
        p = np.asarray(p, dtype=float)
        u = (p - center) / half_width
        inside = np.abs(u) < 1
        w = np.where(inside, 1.0 - u * u, 1.0)
        return (np.where(inside, np.exp(-1.0 / w), 0.0) * np.exp(1j * phase * p))[()]

    return f


def _numeric_derivative(f: Callable, h: float = 1e-3) -> Callable:
    def df(p):
        return (f(p - 2 * h) - 8 * f(p - h) + 8 * f(p + h) - f(p + 2 * h)) / (12 * h)

    return df


@dataclass(frozen=True)
class SymmetryDefect:
    defect: complex  # (f, Kg) - (Kf, g)
    boundary_term: complex  # i cosh(p) conj(f) g evaluated between the support ends
    err_estimate: float


def symmetry_defect(
    f: Callable,
    g: Callable,
    support: tuple[float, float] = (-2.0, 2.0),
    spec: QuadratureSpec = DEFAULT_QUAD,
    fprime: Callable | None = None,
    gprime: Callable | None = None,
) -> SymmetryDefect:
    """``(f, Kg) - (Kf, g)`` for functions supported in ``support``.

    Integration by parts predicts ``i cosh(p) conj(f) g`` between the ends of
    the support, which vanishes for smooth compactly supported functions and
    is generally nonzero for functions cut off sharply.
    """
    fprime = fprime or _numeric_derivative(f)
    gprime = gprime or _numeric_derivative(g)

    def kf(p):
        return 0.5j * (np.sinh(p) * f(p) + 2 * np.cosh(p) * fprime(p))

    def kg(p):
        return 0.5j * (np.sinh(p) * g(p) + 2 * np.cosh(p) * gprime(p))

    a, b = support
    lhs, e1 = integrate_interval(lambda p: np.conj(f(p)) * kg(p), a, b, spec)
    rhs, e2 = integrate_interval(lambda p: np.conj(kf(p)) * g(p), a, b, spec)

    def edge(p):
        return 1j * math.cosh(p) * np.conj(f(p)) * g(p)

    boundary = edge(b) - edge(a)
    return SymmetryDefect(complex(lhs - rhs), complex(boundary), e1 + e2)
