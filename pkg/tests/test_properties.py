"""Invariants checked on generated inputs."""

import json
import math

import numpy as np
from hypothesis import given, settings, strategies as st

from comparison_lab import CurvatureProfile, cmc, estimates, inequality, riccati
from comparison_lab.acceptance import random_ordered_pair
from comparison_lab.warping import solve_jacobi, sturm_compare

seeds = st.integers(0, 2 ** 32 - 1)


@given(seeds, st.floats(-0.5, 1.0))
@settings(max_examples=15)
def test_sturm_ordering_of_log_derivatives(seed, dh0):
    g1, g2 = random_ordered_pair(np.random.default_rng(seed))
    w1 = solve_jacobi(g1, 0.0, 1.0, dh0, horizon=(0.0, 2.0))
    w2 = solve_jacobi(g2, 0.0, 1.0, dh0, horizon=(0.0, 2.0))
    rep = sturm_compare(w1, w2)
    assert rep.hypotheses_met
    assert rep.passed


@given(seeds, st.integers(2, 5), st.sampled_from(["lower", "upper"]))
@settings(max_examples=10)
def test_riccati_solution_stays_symmetric(seed, dim, direction):
    rng = np.random.default_rng(seed)
    side = "upper" if direction == "lower" else "lower"
    path = riccati.random_curvature_path(rng, dim, CurvatureProfile.constant(0.5), side)
    A0 = riccati.random_initial_shape(rng, dim, 0.3, direction)
    state = riccati.integrate_riccati(path, A0, (0.0, 1.0))
    A = state.A(np.linspace(0.0, state.t_end, 17))
    assert np.max(np.abs(A - np.swapaxes(A, 1, 2))) < 1e-10
    assert riccati.verify_hessian_comparison(state, direction).passed


@given(st.sampled_from(["exp", "sinh", "cosh"]), st.floats(0.3, 2.0), seeds)
@settings(max_examples=15)
def test_warped_chart_distance_is_eikonal(name, k, seed):
    chart = inequality.warped_chart(name, k=k)
    assert chart.eikonal_error(n=200, seed=seed % 1000) < 1e-7


@given(st.integers(2, 7), st.floats(1e-3, 30.0))
def test_F_is_bounded_and_increasing(n, r):
    f = cmc.F(r, n)
    sup = 1.0 / (n - 1)
    assert 0.0 < f < sup * (1 + 1e-13)  # rounding slack once F has saturated
    if sup - f > 1e-10:
        assert cmc.F(r * 1.01, n) > f
    # F < tanh-type small-r bound r/n
    assert f <= r / n * (1 + 1e-12)


@given(st.integers(2, 6), st.floats(0.05, 3.0))
def test_critical_radius_solves_nHF_equals_one(n, H):
    p = cmc.CmcParams(n, H)
    r0 = cmc.critical_radius(p)
    if H * n / (n - 1) <= 1.0:
        assert r0 is None
    else:
        assert abs(n * H * cmc.F(r0, n) - 1.0) < 1e-10


@given(st.integers(1, 6), st.integers(0, 3), st.integers(1, 4))
def test_scenario_json_round_trip(m, ell, n):
    s = estimates.Scenario("horocylinder", m,
                           {"type": "hyperbolic_product", "n": n, "ell": ell})
    again = estimates.Scenario.from_dict(json.loads(json.dumps(s.to_dict())))
    assert again.to_dict() == s.to_dict()


@given(st.lists(st.floats(-2, 2), min_size=1, max_size=4))
def test_profile_json_round_trip(coefficients):
    p = CurvatureProfile.polynomial(coefficients)
    q = CurvatureProfile.from_json(p.to_json())
    assert q == p
    t = np.linspace(0.0, 2.0, 9)
    assert np.array_equal(q(t), p(t))


@given(st.floats(0.1, 3.0))
@settings(max_examples=10)
def test_tilted_patch_reverse_margin_is_positive(alpha):
    rep = inequality.verify_reverse_inequality(inequality.tilted_patch(n=48, alpha=alpha))
    assert rep.passed
    assert np.max(np.abs(rep.lhs - 1 / (1 + alpha ** 2))) < 1e-2
    assert math.isfinite(rep.margin_min)
