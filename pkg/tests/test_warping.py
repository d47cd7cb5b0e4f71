import csv
import math

import numpy as np
import pytest

from comparison_lab import (ClosedFormWarping, CurvatureProfile, DomainError, IntegrationError,
                            Truncation, build_barrier, inf_log_derivative, log_derivative,
                            solve_jacobi, sturm_compare, wedge_barrier)

COTH_1 = 1.3130352854993313  # mpmath, 30 digits
COTH_2 = 1.0373147207275481

const = CurvatureProfile.constant


def test_sine_solution_and_focal_radius():
    w = solve_jacobi(const(-1.0), 0.0, 0.0, 1.0)
    assert w.positivity_interval[0] == 0.0
    assert w.positivity_interval[1] == pytest.approx(math.pi, abs=1e-8)
    t = np.linspace(0.0, 3.0, 301)
    assert np.max(np.abs(w.h(t) - np.sin(t))) < 1e-9


@pytest.mark.parametrize("k", [0.5, 1.0, 2.0])
def test_focal_radius_scales_with_curvature(k):
    w = solve_jacobi(const(-k * k), 0.0, 0.0, 1.0)
    assert w.positivity_interval[1] == pytest.approx(math.pi / k, abs=1e-8)


def test_through_zeros_option_keeps_positivity_interval():
    w = solve_jacobi(const(-1.0), 0.0, 0.0, 1.0, horizon=(0.0, 5.0), stop_at_zero=False)
    t = np.linspace(0.0, 5.0, 501)
    assert np.max(np.abs(w.h(t) - np.sin(t))) < 1e-9
    assert w.positivity_interval[1] == pytest.approx(math.pi, abs=1e-8)


def test_exponential_has_unit_log_derivative():
    w = solve_jacobi(const(1.0), 0.0, 1.0, 1.0, horizon=(-5.0, 5.0))
    t = np.linspace(-5.0, 5.0, 101)
    assert np.max(np.abs(w.ratio(t) - 1.0)) < 1e-9
    assert w.lower_unbounded and w.upper_unbounded


def test_sinh_coth_one():
    w = solve_jacobi(const(1.0), 0.0, 0.0, 1.0, horizon=(0.0, 10.0))
    assert log_derivative(w, 1.0) == pytest.approx(COTH_1, abs=1e-10)
    assert w.pole_smooth


def test_sinh_far_out_keeps_relative_accuracy():
    w = solve_jacobi(const(1.0), 0.0, 0.0, 1.0, horizon=(0.0, 40.0))
    assert w.h(40.0) / math.sinh(40.0) == pytest.approx(1.0, abs=1e-8)


def test_linear_solution():
    w = solve_jacobi(const(0.0), 0.0, 2.0, -0.5, horizon=(0.0, 10.0))
    assert w.positivity_interval[1] == pytest.approx(4.0, abs=1e-10)
    assert w.h(1.0) == pytest.approx(1.5, abs=1e-12)


def test_log_derivative_domain_errors():
    w = solve_jacobi(const(-1.0), 0.0, 0.0, 1.0)
    assert log_derivative(w, math.pi / 2) == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(DomainError):
        log_derivative(w, math.pi)
    with pytest.raises(DomainError):
        log_derivative(w, 0.0)


def test_ode_residual_on_polynomial_profile():
    w = solve_jacobi(CurvatureProfile.polynomial([1.0, 0.0, 1.0]), 0.0, 1.0, 0.0,
                     horizon=(0.0, 3.0))
    t = np.linspace(0.0, 3.0, 1000)
    assert np.max(w.residual(t)) < 1e-6


def test_inf_log_derivative_examples():
    sinh = solve_jacobi(const(1.0), 0.0, 0.0, 1.0, horizon=(0.0, 10.0))
    assert inf_log_derivative(sinh, 0.5, 2.0) == pytest.approx(COTH_2, abs=1e-10)
    exp = solve_jacobi(const(1.0), 0.0, 1.0, 1.0, horizon=(0.0, 10.0))
    assert inf_log_derivative(exp, 0.0, 7.0) == pytest.approx(1.0, abs=1e-10)
    sin = solve_jacobi(const(-1.0), 0.0, 0.0, 1.0)
    val, arg = inf_log_derivative(sin, 0.1, math.pi / 2, return_argmin=True)
    assert val == pytest.approx(0.0, abs=1e-9) and arg == pytest.approx(math.pi / 2)
    with pytest.raises(ValueError):
        inf_log_derivative(sinh, 2.0, 1.0)


def test_closed_forms_match_the_solver():
    cases = [("sinh", {"k": 1.0}, (1.0, 0.0, 1.0)), ("cosh", {"k": 1.0}, (1.0, 1.0, 0.0)),
             ("exp", {"k": 1.0}, (1.0, 1.0, 1.0)), ("sin", {"k": 1.0}, (-1.0, 0.0, 1.0))]
    t = np.linspace(0.2, 3.0, 50)
    for name, params, (k, h0, dh0) in cases:
        cf = ClosedFormWarping(name, params)
        num = solve_jacobi(const(k), 0.0, h0, dh0, horizon=(0.0, 3.0))
        assert np.allclose(cf.h(t), num.h(t), rtol=1e-9, atol=1e-12), name
        assert np.allclose(cf.ratio(t), num.ratio(t), rtol=1e-8), name


def test_integral_matches_closed_form():
    w = solve_jacobi(const(1.0), 0.0, 1.0, 1.0, horizon=(0.0, 5.0))
    assert w.integral(0.0, 3.0) == pytest.approx(math.e**3 - 1, rel=1e-9)


def test_csv_export(tmp_path):
    w = solve_jacobi(const(1.0), 0.0, 1.0, 1.0, horizon=(0.0, 2.0))
    path = tmp_path / "w.csv"
    w.to_csv(path, n=11)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["t", "h", "dh", "ratio"]
    assert len(rows) == 12
    assert float(rows[-1][1]) == pytest.approx(math.e**2, rel=1e-9)


def test_blow_up_profile_reports_integration_failure():
    # a profile with a pole inside the horizon: G = 1/(1 - t)^4
    G = CurvatureProfile.closed_form("shifted_power", scale=1.0, shift=-1.0, power=-4.0)
    with pytest.raises((IntegrationError, DomainError)):
        solve_jacobi(G, 0.0, 1.0, 0.0, horizon=(0.0, 0.999999), max_steps=2000)


# sturm ----------------------------------------------------------------------

def test_sturm_flat_vs_hyperbolic():
    w1 = solve_jacobi(const(0.0), 0.0, 0.0, 1.0, horizon=(0.0, 8.0))
    w2 = solve_jacobi(const(1.0), 0.0, 0.0, 1.0, horizon=(0.0, 8.0))
    rep = sturm_compare(w1, w2)
    assert rep.hypotheses_met and rep.passed and rep.max_violation == 0.0


def test_sturm_equal_profiles():
    w1 = solve_jacobi(const(0.3), 0.0, 1.0, 0.2, horizon=(0.0, 4.0))
    w2 = solve_jacobi(const(0.3), 0.0, 1.0, 0.2, horizon=(0.0, 4.0))
    rep = sturm_compare(w1, w2)
    assert rep.passed and abs(rep.margin_min) < 1e-12


def test_sturm_constant_vs_quadratic():
    w1 = solve_jacobi(const(1.0), 0.0, 1.0, 0.0, horizon=(0.0, 3.0))
    w2 = solve_jacobi(CurvatureProfile.polynomial([1.0, 0.0, 1.0]), 0.0, 1.0, 0.0,
                      horizon=(0.0, 3.0))
    rep = sturm_compare(w1, w2)
    assert rep.passed and rep.max_violation <= 1e-8


def test_sturm_flags_unordered_profiles():
    w1 = solve_jacobi(const(1.0), 0.0, 1.0, 0.0, horizon=(0.0, 3.0))
    w2 = solve_jacobi(const(0.5), 0.0, 1.0, 0.0, horizon=(0.0, 3.0))
    rep = sturm_compare(w1, w2)
    assert rep.passed is None and not rep.hypotheses_met


# barriers -------------------------------------------------------------------

def test_barrier_is_primitive_of_h():
    w = solve_jacobi(const(1.0), 0.0, 1.0, 1.0, horizon=(0.0, 5.0))
    g = build_barrier(w, 0.0)
    assert g(2.0) == pytest.approx(math.e**2 - 1, rel=1e-9)
    t = np.linspace(0.3, 4.5, 20)
    eps = 1e-5
    num = (g(t + eps) - g(t - eps)) / (2 * eps)
    assert np.allclose(num, w.h(t), rtol=1e-6)


def test_tube_truncation_is_continuous_and_flat_outside():
    w = solve_jacobi(const(1.0), 0.0, 1.0, 1.0, horizon=(-2.0, 5.0))
    g = build_barrier(w, 0.0, Truncation.tube(2.0))
    assert g(3.0) == g(2.0)
    assert g(-1.0) == g(0.0) == 0.0
    assert g(2.0 - 1e-9) == pytest.approx(g(2.0), abs=1e-7)
    assert g.derivative(3.0) == 0.0 and g.derivative(1.0) == pytest.approx(math.e)


def test_truncation_outside_solution_is_rejected():
    w = solve_jacobi(const(1.0), 0.0, 1.0, 1.0, horizon=(0.0, 1.0))
    with pytest.raises(DomainError):
        build_barrier(w, 0.0, Truncation.tube(3.0))


def test_wedge_barriers():
    g0 = wedge_barrier(0.0)
    assert g0(3.0) == pytest.approx(4.5) and g0.derivative(3.0) == pytest.approx(3.0)
    g2 = wedge_barrier(2.0)
    t = np.linspace(0.0, 2.0, 9)
    assert np.allclose(g2(t), np.cosh(2 * t) / 2, rtol=1e-12)
    clamp = wedge_barrier(2.0, radius=1.0)
    assert clamp(1.5) == pytest.approx(math.cosh(2.0) / 2)
