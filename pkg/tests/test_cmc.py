import csv
import math
from dataclasses import replace

import numpy as np
import pytest

from comparison_lab import CmcParams, build_cmc_sphere, integrate_profile
from comparison_lab.cmc import (F, F_recurrence, critical_radius, flux, integrate_flux_profile,
                                sinh_power_integral, slope, verify_profile_mean_curvature)

# mpmath: int_0^r sinh^{n-1} / sinh^{n-1}(r)
F_ORACLE = {
    (3, 0.5): 0.16130311266153411, (3, 1.0): 0.29448681226651042, (3, 3.0): 0.48753839300012314,
    (4, 0.5): 0.12001075070278354, (4, 1.0): 0.21461088420196886, (4, 3.0): 0.32897713432225113,
    (5, 0.5): 0.09546580396166604, (5, 1.0): 0.16833886355806014, (5, 3.0): 0.24759895498500013,
}
R0_N3_H09 = 1.3916362540845228
HALF_HEIGHT_N2_H1 = 1.2091995761561448


@pytest.mark.parametrize("key", sorted(F_ORACLE))
def test_F_against_oracle(key):
    n, r = key
    assert F(r, n) == pytest.approx(F_ORACLE[key], rel=1e-13)
    assert F_recurrence(r, n) == pytest.approx(F_ORACLE[key], rel=1e-10)


def test_F_two_dimensional_closed_form_and_small_r():
    r = np.linspace(0.0, 5.0, 11)
    assert np.allclose(F(r, 2), np.tanh(r / 2), rtol=1e-15)
    for n in (3, 4, 6):
        below, above = F(0.999e-3, n), F(1.001e-3, n)
        assert above - below == pytest.approx(2e-6 / n, rel=1e-3)
        assert F(0.0, n) == 0.0


def test_F_large_r_does_not_overflow():
    assert F(800.0, 4) == pytest.approx(1 / 3, rel=1e-10)


def test_flux_examples():
    p = CmcParams(2, 0.5)
    assert flux(0.0, 3.0, p) == 0.0
    assert flux(1.0, math.sinh(0.5), p) == pytest.approx(0.0, abs=1e-14)
    assert sinh_power_integral(1.0, 3) == pytest.approx((math.sinh(2) / 2 - 1) / 2, rel=1e-12)


def test_catenoid_flux_is_conserved():
    curve = integrate_flux_profile(CmcParams(2, 0.0), 1.0, 0.5, 4.0)
    assert curve.flux_deviation() < 1e-10
    assert curve.params.I == pytest.approx(math.sinh(1.0) * 0.5 / math.sqrt(1.25))


def test_salavessa_closed_form():
    curve = integrate_profile(CmcParams(2, 0.5), 5.0)
    assert curve.regime == "salavessa" and curve.critical_radius is None
    assert np.max(np.abs(curve.u - 2 * (np.cosh(curve.r / 2) - 1))) < 1e-6
    fd = np.gradient(curve.u, curve.r)
    assert np.max(np.abs(fd[1:-1] - np.sinh(curve.r[1:-1] / 2))) < 1e-4


def test_critical_radius_cases():
    assert critical_radius(CmcParams(2, 1.0)) == pytest.approx(math.log(3.0), abs=1e-12)
    assert critical_radius(CmcParams(2, 0.5)) is None
    r0 = critical_radius(CmcParams(3, 0.9))
    assert abs(2.7 * F(r0, 3) - 1.0) < 1e-10
    assert r0 == pytest.approx(R0_N3_H09, abs=1e-10)


def test_subcritical_slopes_stay_finite():
    p = CmcParams(2, 0.4)
    curve = integrate_profile(p, 8.0)
    assert curve.regime == "subcritical"
    q = 2 * 0.4 * F(curve.r, 2)
    assert np.all(q < 0.8) and np.all(np.isfinite(curve.du))
    assert np.max(curve.du) < 0.8 / 0.6


def test_sphere_is_closed_and_symmetric():
    curve = build_cmc_sphere(CmcParams(2, 1.0))
    assert curve.closed
    assert curve.max_height == pytest.approx(HALF_HEIGHT_N2_H1, abs=1e-9)
    assert curve.total_height == pytest.approx(2 * HALF_HEIGHT_N2_H1, abs=1e-9)
    assert np.allclose(curve.mirror_u, 2 * curve.max_height - curve.u)
    assert curve.flux_deviation() < 1e-8
    assert math.isinf(curve.du[-1])
    assert curve.u[0] == 0.0 and curve.du[0] == 0.0
    with pytest.raises(ValueError):
        build_cmc_sphere(CmcParams(2, 0.5))


@pytest.mark.parametrize("n,H,r_max", [(3, 2 / 3, 4.0), (3, 1.0, 5.0), (4, 0.9, 5.0),
                                       (5, 0.5, 3.0)])
def test_flux_and_mean_curvature_checks(n, H, r_max):
    p = CmcParams(n, H)
    curve = build_cmc_sphere(p) if p.regime == "critical" else integrate_profile(p, r_max)
    assert curve.flux_deviation() < 1e-6
    assert verify_profile_mean_curvature(curve).passed


def test_mean_curvature_controls():
    curve = integrate_profile(CmcParams(2, 0.5), 5.0)
    assert verify_profile_mean_curvature(curve).max_deviation < 1e-4
    flat = integrate_profile(CmcParams(2, 0.0), 3.0)
    assert verify_profile_mean_curvature(flat).max_deviation == 0.0
    bent = replace(curve, u=curve.u * 1.01)
    rep = verify_profile_mean_curvature(bent)
    assert not rep.passed and rep.max_deviation > 1e-3


def test_slope_is_infinite_past_the_critical_radius():
    p = CmcParams(2, 1.0)
    assert math.isinf(slope(2.0, p))
    assert slope(0.0, p) == 0.0


def test_csv_schema(tmp_path):
    curve = integrate_profile(CmcParams(2, 0.5), 2.0, samples=11)
    curve.to_csv(tmp_path / "c.csv")
    rows = list(csv.reader(open(tmp_path / "c.csv")))
    assert rows[0] == ["r", "u", "du", "flux"] and len(rows) == 12


def test_parameter_validation():
    with pytest.raises(ValueError):
        CmcParams(1, 0.5)
    with pytest.raises(ValueError):
        CmcParams(2, -0.1)
    with pytest.raises(ValueError):
        integrate_profile(CmcParams(2, 0.5, I=1.0), 2.0)
    with pytest.raises(ValueError):
        F(-1.0, 3)
