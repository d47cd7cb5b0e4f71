import json
from dataclasses import replace

import numpy as np
import pytest

from comparison_lab import inequality as iq


@pytest.mark.parametrize("name", sorted(iq.CHARTS))
def test_chart_eikonal_and_metric(name):
    chart = iq.get_chart(name)
    assert chart.eikonal_error(n=500) < 1e-8
    assert chart.metric_spd(n=200)


def test_christoffel_of_horocylinder():
    chart = iq.horocylinder_chart()
    X = np.array([[0.3, 2.0, -1.0]])
    gam = chart.christoffel(X)[0]
    y = 2.0
    # hyperbolic upper half plane: G^x_xy = -1/y, G^y_xx = 1/y, G^y_yy = -1/y
    assert gam[0, 0, 1] == pytest.approx(-1 / y, abs=1e-8)
    assert gam[1, 0, 0] == pytest.approx(1 / y, abs=1e-8)
    assert gam[1, 1, 1] == pytest.approx(-1 / y, abs=1e-8)
    assert np.allclose(gam[2], 0.0, atol=1e-8)
    assert np.allclose(gam, np.swapaxes(gam, 1, 2))


def test_flat_laplacian_is_exact_on_quadratics():
    patch = iq.flat_patch(n=33)
    x, y = patch.X[..., 0], patch.X[..., 1]
    lap = iq.discrete_laplace_beltrami(patch, x ** 2 + 3 * y ** 2)
    inner = lap[patch.interior]
    assert np.all(np.isfinite(inner)) and np.max(np.abs(inner - 8.0)) < 1e-10
    assert np.all(np.isnan(lap[:2])) and np.all(np.isnan(lap[:, -2:]))


def test_sphere_geometry():
    patch = iq.sphere_patch(n=96)
    sl = patch.interior
    assert np.max(np.abs(patch.mean_curvature[sl] - 1.0)) < 1e-3
    z = patch.X[..., 2]
    lap = iq.discrete_laplace_beltrami(patch, z)[sl]
    assert np.max(np.abs(lap + 2 * z[sl])) < 1e-3


def test_laplacian_error_shrinks_with_grid():
    errs = []
    for n in (32, 64):
        patch = iq.sphere_patch(n=n)
        z = patch.X[..., 2]
        lap = iq.discrete_laplace_beltrami(patch, z)[patch.interior]
        errs.append(np.max(np.abs(lap + 2 * z[patch.interior])))
    assert errs[1] < errs[0] / 3


def test_equidistant_is_an_equality_case():
    patch = iq.equidistant_patch(n=64)
    for form in iq.FORMS:
        rep = iq._verify(patch, form)
        assert rep.passed and abs(rep.margin_min) < 1e-8
        assert rep.max_abs_lhs < 1e-8


@pytest.mark.parametrize("make", [iq.equidistant_patch, iq.bump_patch])
def test_shrinking_mean_curvature_breaks_reverse_form(make):
    rep = iq.verify_reverse_inequality(make(n=64), mean_curvature_scale=0.5)
    assert not rep.passed and rep.margin_min < -0.1


def test_tilted_patch_lhs_matches_closed_form():
    alpha = 1.0
    for n, bound in ((64, 2e-3), (128, 5e-4)):
        rep = iq.verify_reverse_inequality(iq.tilted_patch(n=n, alpha=alpha))
        assert rep.passed
        assert np.max(np.abs(rep.lhs - 1 / (1 + alpha ** 2))) < bound
    assert iq.verify_tube_inequality(iq.tilted_patch(n=64)).passed


def test_grid_study_records_every_grid():
    rep = iq.grid_study(lambda n: iq.tilted_patch(n=n), "reverse", grids=(32, 64))
    assert [c["grid"] for c in rep.convergence] == [32, 64]
    assert rep.grid == (64, 64)
    d = rep.to_dict()
    json.dumps(d)
    assert d["pass"] is True and "lhs" not in d


def test_errors():
    with pytest.raises(ValueError):
        iq._verify(iq.flat_patch(n=8), "sideways")
    with pytest.raises(ValueError):
        bare = replace(iq.euclidean_chart(), certificates={})
        iq.verify_tube_inequality(iq.flat_patch(chart=bare, n=8))
    with pytest.raises(ValueError):
        iq.ImmersionPatch(iq.euclidean_chart(), lambda u, v: np.array([u, v, 0 * u]),
                          (0, 1), (0, 1), 2, 5)
    with pytest.raises(ValueError):
        iq.tilted_patch(n=8, y_range=(-1.0, 1.0))
    with pytest.raises(ValueError):
        iq.get_chart("klein-bottle")
    patch = iq.flat_patch(n=8)
    with pytest.raises(ValueError):
        iq.discrete_laplace_beltrami(patch, np.zeros((3, 3)))
