import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sequiv.errors import NonFiniteSample, ToleranceNotMet
from sequiv.numerics import (
    OdeSpec,
    QuadratureSpec,
    gauss_legendre_extended,
    integrate_folded,
    integrate_real_line,
    integrate_theta,
    ode_solve,
)
from sequiv.spectral import psi


def test_sech_integrates_to_pi():
    value, err = integrate_real_line(lambda p: 1.0 / math.cosh(p))
    assert abs(value - math.pi) < 1e-10
    assert err < 1e-10


def test_zero_integrand_is_exactly_zero():
    value, err = integrate_real_line(lambda p: 0.0)
    assert value == 0


def test_weighted_exponential_matches_secant():
    f = lambda x: math.exp(2 * x * math.pi / 4) / math.cosh(math.pi * x)
    spec = QuadratureSpec(truncation=60.0, decay_rate=math.pi / 2)
    value, _ = integrate_real_line(f, spec)
    assert abs(value - math.sqrt(2)) < 1e-10


def test_theta_constant():
    value, _ = integrate_theta(lambda th: 0.5)
    assert abs(value - math.pi) < 1e-12


@pytest.mark.parametrize("n,k", [(0, 1), (2, -3), (5, 4)])
def test_theta_fourier_modes_orthogonal(n, k):
    value, _ = integrate_theta(lambda th: np.exp(-1j * n * th) * np.exp(1j * k * th))
    assert abs(value) < 1e-10


def test_theta_form_of_normalisation_matches_p_form():
    # |Psi_1/2|^2 dp becomes d(theta) / (2 pi) after sinh p = tan(theta/2)
    theta_value, e1 = integrate_theta(lambda th: 1.0 / (2 * math.pi))
    p_value, e2 = integrate_real_line(lambda p: abs(psi(0.5, p)) ** 2)
    assert abs(theta_value - p_value) < e1 + e2 + 1e-12
    assert abs(p_value - 1) < 1e-10


def test_endpoint_singularity_is_resolved():
    # int cos(theta/2)^(-1/2) over (-pi, pi) = 2 sqrt(pi) Gamma(1/4) / Gamma(3/4)
    exact = 2 * math.sqrt(math.pi) * math.gamma(0.25) / math.gamma(0.75)
    value, _ = integrate_theta(lambda th: math.cos(th / 2) ** -0.5 if math.cos(th / 2) > 0 else 0.0)
    assert abs(value - exact) < 1e-10


def test_transformed_compact_scheme_agrees():
    spec = QuadratureSpec(scheme="transformed-compact")
    value, _ = integrate_real_line(lambda p: math.exp(-p * p), spec)
    assert abs(value - math.sqrt(math.pi)) < 1e-10


def test_slow_tail_is_reported():
    with pytest.raises(ToleranceNotMet) as info:
        integrate_real_line(lambda p: 1.0 / (1.0 + p * p), QuadratureSpec(truncation=10.0))
    assert info.value.err_estimate > 1e-10


def test_non_finite_sample_raises():
    with pytest.raises(NonFiniteSample):
        integrate_real_line(lambda p: math.nan)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(scheme="simpson")
    with pytest.raises(ValueError):
        QuadratureSpec(abs_tol=0.0)
    with pytest.raises(ValueError):
        OdeSpec(method="euler")


@settings(max_examples=25, deadline=None)
@given(
    st.floats(-3, 3),
    st.floats(-3, 3),
    st.floats(0.2, 2.0),
    st.floats(-2.0, 2.0),
)
def test_linearity(alpha, beta, width, shift):
    f = lambda p: math.exp(-p * p / width)
    g = lambda p: 1.0 / math.cosh(p - shift)
    a, ea = integrate_real_line(f)
    b, eb = integrate_real_line(g)
    c, ec = integrate_real_line(lambda p: alpha * f(p) + beta * g(p))
    assert abs(c - (alpha * a + beta * b)) <= 2 * (ec + abs(alpha) * ea + abs(beta) * eb) + 1e-12


def test_gauss_legendre_extended_is_exact_on_polynomials():
    x, w = gauss_legendre_extended(20)
    assert x.dtype == np.longdouble
    assert abs(w.sum() - 2) < 1e-18
    assert abs((w * x**38).sum() - np.longdouble(2) / 39) < 1e-18


def test_folded_rule_cancels_odd_integrands_exactly():
    value, err = integrate_folded(lambda x: x**3 / np.cosh(x), 40.0)
    assert value == 0
    even, _ = integrate_folded(lambda x: 1 / np.cosh(x), 40.0)
    assert abs(float(even) - math.pi) < 1e-15


def test_ode_harmonic_half_period():
    path = ode_solve(lambda t, y: np.array([y[1], -y[0]]), (1.0, 0.0), (0.0, math.pi))
    assert np.allclose(path.y[-1], [-1.0, 0.0], atol=1e-6)


def test_ode_constant_field():
    path = ode_solve(lambda t, y: np.zeros(2), (0.3, -2.0), (0.0, 1.0))
    assert np.all(path.y == np.array([0.3, -2.0]))


def test_ode_alternative_oscillator_on_strip():
    rhs = lambda t, y: np.array([y[0] * math.sinh(y[1]), -math.cosh(y[1])])
    path = ode_solve(rhs, (1.0, 0.0), (0.0, 1.0))
    assert abs(path.y[-1, 0] - math.cos(1.0)) < 1e-6


def test_ode_backward_matches_forward():
    rhs = lambda t, y: np.array([y[1], -y[0]])
    fwd = ode_solve(rhs, (1.0, 0.0), (0.0, 1.0))
    back = ode_solve(rhs, fwd.y[-1], (1.0, 0.0))
    assert np.allclose(back.y[-1], [1.0, 0.0], atol=1e-10)


@pytest.mark.parametrize("method", ["rk4-fixed", "rk45-adaptive"])
def test_ode_stop_predicate(method):
    path = ode_solve(
        lambda t, y: np.array([1.0, 0.0]),
        (0.0, 0.0),
        (0.0, 2.0),
        OdeSpec(method=method, step=1e-2),
        stop=lambda t, y: y[0] > 1.0,
    )
    assert path.stopped
    assert path.y[-1, 0] <= 1.0


def test_rk4_energy_drift_scales_like_step_to_fourth():
    def drift(step):
        path = ode_solve(lambda t, y: np.array([y[1], -y[0]]), (1.0, 0.0), (0.0, 10.0), OdeSpec(step=step))
        energy = 0.5 * (path.y[:, 0] ** 2 + path.y[:, 1] ** 2)
        return np.max(np.abs(energy - 0.5))

    ratio = drift(0.02) / drift(0.01)
    assert 12 < ratio < 40
