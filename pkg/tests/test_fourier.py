import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sequiv.errors import DomainError
from sequiv.exactpoly import w_poly
from sequiv.numerics import integrate_real_line
from sequiv.fourier import (
    apply_nonlocal_H,
    apply_nonlocal_H_callable,
    apply_nonlocal_general,
    fourier_transform_num,
    generating_phi,
    gram_w,
    gram_w_estimate,
    nonlocal_action,
    phi_closed,
    phi_half,
    phi_half_complex,
    psi_generating,
    residue_contour_check,
    shifted_counterexample,
    taylor_coefficients,
    transform_rows_csv,
    transform_table,
    weight_integral,
    ww_generating_check,
)
from sequiv.spectral import psi


def test_phi_examples():
    assert phi_closed(0, 0.0) == 1.0
    assert phi_closed(2, 0.0) == -0.5


@settings(max_examples=50, deadline=None)
@given(st.integers(-8, 8), st.floats(-4, 4))
def test_reflection(n, x):
    # Phi_{-lam}(x) = Phi_lam(-x) with lam = n + 1/2, -lam = (-n - 1) + 1/2
    assert math.isclose(phi_closed(-n - 1, x), phi_closed(n, -x), rel_tol=1e-12, abs_tol=1e-300)


@settings(max_examples=50, deadline=None)
@given(st.floats(-30, 30))
def test_phi_half_forms_agree(x):
    assert math.isclose(phi_half(x), phi_half_complex(x).real, rel_tol=1e-12)


def test_phi_half_shift_by_i():
    x = np.linspace(-2, 2, 9)
    assert np.allclose(phi_half_complex(x + 1j), -1j * phi_half(x), atol=1e-14)
    assert np.allclose(phi_half_complex(x - 1j), 1j * phi_half(x), atol=1e-14)


def test_transform_examples():
    v, _ = fourier_transform_num(0.5, 0.0)
    assert abs(v - 1) < 1e-8
    assert abs(v.imag) < 1e-10
    v, _ = fourier_transform_num(2.5, 0.7)
    assert abs(v - phi_closed(2, 0.7)) < 1e-8


def test_transform_table_grid():
    rows = transform_table(range(-3, 4), np.linspace(-3, 3, 25))
    assert len(rows) == 175
    assert max(r.abs_error for r in rows) < 1e-8
    assert max(abs(r.numeric_im) for r in rows) < 1e-10
    text = transform_rows_csv(rows[:2])
    assert text == transform_rows_csv(rows[:2])
    assert text.splitlines()[0].startswith("n,x,numeric_re")


@settings(max_examples=10, deadline=None)
@given(st.floats(-4, 4), st.floats(-3, 3))
def test_transform_at_generic_labels_is_real_and_reflects(lam, x):
    # Psi_lam(-p) = conj(Psi_lam(p)) makes every transform real
    v, _ = fourier_transform_num(lam, x)
    w, _ = fourier_transform_num(-lam, -x)
    assert abs(v.imag) < 1e-10
    assert abs(v - w) < 1e-9


def test_generating_examples():
    x = np.linspace(-2, 2, 5)
    assert np.allclose(generating_phi(x, 0.0), phi_half(x))
    assert generating_phi(0.0, 0.5) == pytest.approx(1 / math.sqrt(1.25), abs=1e-15)
    h = 1e-5
    d = (generating_phi(0.9, h) - generating_phi(0.9, -h)) / (2 * h)
    assert abs(d - phi_closed(1, 0.9)) < 1e-9
    with pytest.raises(DomainError):
        generating_phi(0.0, 1.0)
    with pytest.raises(DomainError):
        psi_generating(0.0, -1.5)


@pytest.mark.parametrize("x", [-1.3, 0.0, 0.8, 2.2])
def test_taylor_coefficients_of_phi_generating(x):
    c = taylor_coefficients(lambda t: generating_phi(x, t), 8)
    want = np.array([phi_closed(n, x) for n in range(9)])
    assert np.max(np.abs(c - want)) < 1e-12


@pytest.mark.parametrize("p", [-2.0, 0.4, 3.1])
def test_taylor_coefficients_of_psi_generating(p):
    c = taylor_coefficients(lambda t: psi_generating(p, t), 8)
    want = np.array([psi(n + 0.5, p) for n in range(9)])
    assert np.max(np.abs(c - want)) < 1e-12


def test_generating_transform_by_quadrature():
    x, t = 0.6, -0.4
    v, _ = integrate_real_line(lambda p: psi_generating(p, t) * np.exp(1j * p * x) / math.sqrt(2 * math.pi))
    assert abs(v - generating_phi(x, t)) < 1e-9


def test_nonlocal_examples():
    assert apply_nonlocal_H(0, 0.0) == 0.5
    x = 0.83
    assert math.isclose(apply_nonlocal_H(3, x), 3.5 * phi_closed(3, x), rel_tol=1e-12)


@pytest.mark.parametrize("n", list(range(-21, 21)))
def test_nonlocal_factor_is_exact(n):
    act = nonlocal_action(n, 0.3)
    assert act.exact


def test_nonlocal_matches_direct_continuation():
    x = np.linspace(-2, 2, 11)
    for n in (0, 1, 4, -1, -3):
        phi = lambda z, n=n: _phi_complex(n, z)
        direct = apply_nonlocal_H_callable(phi, x)
        assert np.allclose(direct, (n + 0.5) * phi_closed(n, x), atol=1e-10)


def _phi_complex(n, z):
    m = n if n >= 0 else -n - 1
    coeffs = [complex(c) for c in w_poly(m).float_coeffs()]
    poly = np.polyval(coeffs[::-1], z) / math.factorial(m)
    base = phi_half_complex(z) if n >= 0 else phi_half_complex(-z)
    return base * poly * (-1) ** (m if n < 0 else 0)


def test_general_form_reduces_to_oscillator_form():
    x = np.linspace(-2, 2, 9)
    phi = lambda z: phi_half_complex(z) * 2 * z
    a = apply_nonlocal_general(phi, lambda z: z / math.sqrt(2), x)
    b = apply_nonlocal_H_callable(phi, x)
    assert np.allclose(a, b, atol=1e-13)


def test_counterexample_examples():
    rep0 = shifted_counterexample(0.0, 0.7)
    assert abs(rep0.multiplier_exact - 0.5) < 1e-12
    rep = shifted_counterexample(1.0, 0.0)
    assert abs(rep.multiplier_exact - 1.5) < 1e-12
    assert abs(rep.multiplier_fd - 1.5) < 1e-6
    assert rep.x1_residual < 1e-10
    assert rep.transform_error < 1e-8


@settings(max_examples=15, deadline=None)
@given(st.floats(-2, 2), st.floats(-3, 3))
def test_counterexample_multiplier(a, p):
    rep = shifted_counterexample(a, p)
    assert rep.error < 1e-6
    assert rep.x1_residual < 1e-10


def test_counterexample_is_not_an_eigenfunction():
    m0 = shifted_counterexample(1.0, 0.0).multiplier_exact
    m2 = shifted_counterexample(1.0, 2.0).multiplier_exact
    assert abs(m2 - m0) > 1.0


def test_gram_examples():
    g = gram_w(3)
    assert abs(g[0, 0] - 1) < 1e-12
    assert abs(g[3, 3] - 36) / 36 < 1e-12
    assert g[1, 2] == 0.0


def test_gram_eight():
    g, err = gram_w_estimate(8)
    fac = np.array([math.factorial(n) for n in range(9)], dtype=float)
    assert np.max(np.abs(np.diag(g) / fac**2 - 1)) < 1e-8
    off = g - np.diag(np.diag(g))
    assert np.max(np.abs(off)) < 1e-8
    odd_even = [(n, k) for n in range(9) for k in range(9) if (n + k) % 2]
    assert max(abs(g[n, k]) for n, k in odd_even) < 1e-10


def test_gram_twelve_relative():
    g, err = gram_w_estimate(12)
    fac = np.array([math.factorial(n) for n in range(13)], dtype=float)
    assert np.max(np.abs(g / np.outer(fac, fac) - np.eye(13))) < 1e-8


def test_gram_domain():
    with pytest.raises(DomainError):
        gram_w(13)


@pytest.mark.parametrize("theta", [0.0, math.pi / 6, math.pi / 4, math.pi / 3, -1.2])
def test_weight_integral(theta):
    assert abs(weight_integral(theta) - 1 / math.cos(theta)) < 1e-10


def test_weight_integral_domain():
    with pytest.raises(DomainError):
        weight_integral(math.pi / 2)


def test_ww_examples():
    assert abs(ww_generating_check(0.0, 0.0) - 1) < 1e-10
    assert abs(ww_generating_check(0.3, 0.5) - 1 / 0.85) < 1e-8
    assert abs(ww_generating_check(-0.4, 0.4) - 1 / 1.16) < 1e-8


@settings(max_examples=10, deadline=None)
@given(st.floats(-0.9, 0.9), st.floats(-0.9, 0.9))
def test_ww_random(s, t):
    assert abs(ww_generating_check(s, t) - 1 / (1 - s * t)) < 1e-8


def test_ww_taylor_coefficients_match_gram_diagonal():
    # 1/(1 - st) = sum (st)^n, and int W_n W_k / cosh = (n!)^2 delta
    g = gram_w(5)
    c = taylor_coefficients(lambda t: 1 / (1 - 0.5 * t), 5)
    for n in range(6):
        assert abs(c[n] * 2**n - g[n, n] / math.factorial(n) ** 2) < 1e-10


def test_residue_examples():
    rep = residue_contour_check(0.0, 0.0)
    assert abs(rep.residue_formula + 1j / math.pi) < 1e-15
    assert abs(2j * math.pi * rep.residue_formula / 2 - 1) < 1e-15
    assert abs(rep.pole - 0.5j * math.pi) < 1e-15
    assert rep.periodicity_error < 1e-12


@settings(max_examples=10, deadline=None)
@given(st.floats(-2, 2), st.floats(-0.9, 0.9))
def test_contour_identities(x, t):
    rep = residue_contour_check(x, t)
    assert rep.max_error < 1e-8
    assert rep.pole_residual < 1e-12
    assert rep.side_bound < 1e-8
