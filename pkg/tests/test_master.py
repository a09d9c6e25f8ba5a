import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sequiv.classical import constant_potential, integrate_flow, HamiltonianModel, oscillator
from sequiv.errors import DivisionNearZero, DomainError
from sequiv.master import (
    MasterProblem,
    closed_form_hprime,
    euler_lagrange_proportionality,
    fit_general_solution,
    integrate_master,
    master_residual_general,
    solve_master,
)

OSC = oscillator()


def test_solve_master_at_x_one():
    sol = solve_master(MasterProblem(OSC, 1.0))
    assert np.max(np.abs(sol.h - np.cosh(sol.p))) < 1e-8
    assert sol.beta_coeff == 1.0
    assert abs(sol.alpha_coeff) < 1e-10


def test_initial_value_is_exact():
    sol = solve_master(MasterProblem(oscillator(0.3), 0.7))
    assert sol.h[sol.p == 0][0] == math.sqrt(2 * (0.5 * 0.49 + 0.3))


def test_regularised_potential_at_origin():
    pot = oscillator(1.0)
    sol = solve_master(MasterProblem(pot, 0.0))
    assert np.max(np.abs(sol.h - math.sqrt(2) * np.cosh(sol.p))) < 1e-8


def test_zero_potential_rejected():
    with pytest.raises(DomainError):
        solve_master(MasterProblem(OSC, 0.0))


def test_closed_form_examples():
    assert closed_form_hprime(OSC, 1.0, 0.0) == 1.0
    assert closed_form_hprime(OSC, 0.0, 3.0) == 0.0
    assert math.isclose(closed_form_hprime(OSC, 2.0, 1.0), 2 * math.cosh(1.0))
    with pytest.raises(DomainError):
        closed_form_hprime(constant_potential(-1.0), 0.0, 0.0)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 3.0))
def test_beta_sweep(x):
    sol = solve_master(MasterProblem(OSC, x, p_max=1.0, grid=500))
    assert abs(sol.beta_coeff - math.sqrt(2 * OSC(x))) < 1e-8
    assert abs(sol.alpha_coeff) < 1e-10


def test_general_solution_structure():
    p, h, dh = integrate_master(0.7, -0.3, 5.0)
    alpha, beta = fit_general_solution(p, h, dh)
    assert (alpha, beta) == (-0.3, 0.7)
    fit = alpha * np.sinh(p) + beta * np.cosh(p)
    assert np.max(np.abs(h - fit)) < 1e-8


def test_residual_of_closed_form():
    p = np.linspace(-5, 5, 10001)
    res = master_residual_general(p, np.cosh(p))
    assert res.general < 1e-10
    assert res.reduced < 1e-10


def test_residual_of_constant_is_one():
    p = np.linspace(-2, 2, 401)
    res = master_residual_general(p, np.full_like(p, 3.0))
    assert abs(res.general - 1.0) < 1e-12


def test_residual_of_solver_output():
    sol = solve_master(MasterProblem(OSC, 1.0))
    assert master_residual_general(sol.p, sol.h).general < 1e-6
    assert master_residual_general(sol.p, sol.h, sol.dh).general < 1e-6


def test_residual_division_guard():
    p = np.linspace(-1, 1, 201)
    with pytest.raises(DivisionNearZero):
        master_residual_general(p, 0.0 * p)


def test_master_csv_columns():
    sol = solve_master(MasterProblem(OSC, 1.0, p_max=0.01, grid=2))
    text = sol.to_csv(OSC, 1.0)
    assert text.splitlines()[0] == "p_prime,h_prime,dh_prime,closed_form,abs_error"
    assert len(text.splitlines()) == 6


def test_euler_lagrange_on_solution():
    traj = integrate_flow(HamiltonianModel.standard(OSC), 1.0, 0.0, (0.0, 1.4))
    rep = euler_lagrange_proportionality(OSC, traj)
    assert rep.max_el < 1e-4
    assert rep.max_el_prime < 1e-4


def test_euler_lagrange_ratio_on_perturbed_path():
    t = np.linspace(0.0, 1.2, 1201)
    rep = euler_lagrange_proportionality(OSC, (t, np.cos(t) + 0.01 * t * t))
    assert rep.max_ratio_deviation < 1e-3
    assert np.all(np.isfinite(rep.factor))
