import csv

import numpy as np
import pytest

from comparison_lab import CurvatureProfile, check_criterion, simulate_radial_diffusion
from comparison_lab.stochastic import (COMPLETE, CONVERGENT, DIVERGENT, INCOMPLETE_SUSPECTED,
                                       INCONCLUSIVE, check_mean_curvature_growth,
                                       feller_integral, model_criterion_profile, model_warping,
                                       path_normals, survival_curve)


def test_criterion_constant_profile_is_complete():
    v = check_criterion(CurvatureProfile.constant(1.0))
    assert v.overall == COMPLETE and v.integral_divergent == DIVERGENT


def test_criterion_quadratic_boundary_case_diverges():
    v = check_criterion(CurvatureProfile.polynomial([1.0, 0.0, 1.0]))
    assert v.integral_divergent == DIVERGENT and v.overall == COMPLETE


def test_criterion_sixth_power_is_incomplete_suspected():
    G = CurvatureProfile.closed_form("shifted_power", scale=1.0, shift=1.0, power=6.0)
    v = check_criterion(G)
    assert v.integral_divergent == CONVERGENT and v.overall == INCOMPLETE_SUSPECTED


def test_criterion_log_corrected_quadratic_diverges():
    v = check_criterion(CurvatureProfile.power_log(scale=1.0, depth=1, t_min=3.0))
    assert v.integral_divergent == DIVERGENT


def test_criterion_needs_monotone_positive_profile():
    v = check_criterion(CurvatureProfile.polynomial([1.0, -0.001]), tail_horizon=100.0)
    assert not v.nondecreasing and v.overall == INCONCLUSIVE
    v = check_criterion(CurvatureProfile.constant(0.0))
    assert not v.g0_positive and v.overall == INCONCLUSIVE


def test_tail_fit_on_tabulated_profile():
    t = np.linspace(0.0, 1e4, 2001)
    v = check_criterion(CurvatureProfile.tabulated(t, 1.0 + t**3))
    assert v.integral_divergent == CONVERGENT
    assert v.tail_exponent == pytest.approx(3.0, abs=0.05)


def test_model_verdicts():
    assert check_criterion(model_criterion_profile("sinh")).overall == COMPLETE
    assert check_criterion(model_criterion_profile("exp4")).overall == INCOMPLETE_SUSPECTED


def test_mean_curvature_growth():
    one = CurvatureProfile.constant(1.0)
    quad = CurvatureProfile.polynomial([1.0, 0.0, 1.0])
    assert check_mean_curvature_growth(lambda r: 0.0, one, 1.0).holds
    assert check_mean_curvature_growth(lambda r: r, quad, 1.0).holds
    assert not check_mean_curvature_growth(lambda r: r * r, one, 1.0).holds


def test_path_normals_are_keyed_by_path():
    a = path_normals(7, 3, 100)
    assert np.array_equal(a, path_normals(7, 3, 100))
    assert not np.array_equal(a, path_normals(7, 4, 100))
    assert not np.array_equal(a, path_normals(8, 3, 100))


def _sim(name, **kw):
    args = dict(fiber_dim=1, r0=1.0, T=1.0, dt=1e-3, paths=500, seed=11)
    args.update(kw)
    return simulate_radial_diffusion(model_warping(name), **args)


def test_simulation_is_deterministic_and_order_independent():
    a = _sim("exp4")
    b = _sim("exp4")
    assert a.to_dict() == b.to_dict()
    assert np.array_equal(a.exit_times, b.exit_times, equal_nan=True)
    few = _sim("exp4", paths=100)
    assert np.array_equal(few.exit_times, a.exit_times[:100], equal_nan=True)


def test_backends_agree():
    a = _sim("exp4", backend="numba")
    b = _sim("exp4", backend="numpy")
    assert a.exploded == b.exploded
    assert np.allclose(a.exit_times, b.exit_times, equal_nan=True)


def test_zero_drift_survives_and_zero_horizon():
    flat = _sim("flat", T=1.0)
    assert flat.survival_probability == 1.0
    zero = _sim("exp4", T=0.0)
    assert zero.survival_probability == 1.0 and zero.exploded == 0


def test_separation_small_sample():
    assert _sim("sinh").survival_probability >= 0.99
    assert _sim("exp4").explosion_fraction >= 0.9


def test_survival_curves():
    times = np.linspace(0.0, 1.0, 21)
    inc = [p for _, p, _ in survival_curve(_sim("exp4"), times)]
    assert inc[0] == 1.0 and all(a >= b for a, b in zip(inc, inc[1:])) and inc[-1] < 0.2
    comp = [p for _, p, _ in survival_curve(_sim("sinh"), times)]
    assert min(comp) >= 0.99
    with pytest.raises(ValueError):
        survival_curve(_sim("sinh"), [2.0])


# mpmath nested quadrature of 2 int_1^y (h(z)/h(y)) dz dy
FELLER_SINH_20 = 35.9085053721463
FELLER_EXP4_5 = 0.204050357907194
FELLER_EXP4_10 = 0.211554302141849


def test_feller_integral_matches_oracle_and_separates_models():
    sinh = model_warping("sinh")
    assert feller_integral(sinh, 1, 1.0, 20.0) == pytest.approx(FELLER_SINH_20, rel=1e-7)
    # grows linearly in R: no explosion
    assert feller_integral(sinh, 1, 1.0, 40.0) - feller_integral(sinh, 1, 1.0, 20.0) > 39.0
    exp4 = model_warping("exp4")
    assert feller_integral(exp4, 1, 1.0, 5.0) == pytest.approx(FELLER_EXP4_5, rel=1e-6)
    assert feller_integral(exp4, 1, 1.0, 10.0) == pytest.approx(FELLER_EXP4_10, rel=1e-6)
    # bounded in R: explosion
    assert feller_integral(exp4, 1, 1.0, 40.0) < 0.215


def test_csv_schema(tmp_path):
    st = _sim("exp4", paths=20)
    st.to_csv(tmp_path / "bm.csv")
    rows = list(csv.reader(open(tmp_path / "bm.csv")))
    assert rows[0] == ["path_id", "exploded", "exit_time"] and len(rows) == 21
    assert {r[1] for r in rows[1:]} <= {"0", "1"}


def test_invalid_inputs():
    with pytest.raises(ValueError):
        _sim("sinh", r0=-1.0)
    with pytest.raises(ValueError):
        _sim("sinh", dt=0.0)
    with pytest.raises(ValueError):
        model_warping("torus")
