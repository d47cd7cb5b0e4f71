import json
import math
from fractions import Fraction

import pytest

from comparison_lab import FocalRadiusError, PreconditionError, Scenario, compute_bound
from comparison_lab.estimates import (check_scalar_curvature_condition, exact,
                                      horocylinder_check, render_table)

COTH_1 = 1.3130352854993313
COTH_2 = 1.0373147207275481
ONE = {"kind": "constant", "k": 1.0}


def bound(**data):
    return compute_bound(Scenario.from_dict(data))


def test_exact_conversion():
    assert exact(0.25) == Fraction(1, 4)
    assert exact(3) == Fraction(3)
    assert exact(0.2) == Fraction(1, 5)
    assert exact(math.pi) is None or exact(math.pi) == Fraction(repr(math.pi))


@pytest.mark.parametrize("m,ell,expected", [(2, 1, Fraction(1, 2)), (3, 1, Fraction(2, 3))])
def test_product_tube(m, ell, expected):
    for d in (0.5, 3.0, 20.0):
        rep = bound(theorem="product_tube", m=m, tube_depth=d, initial_shape_bound=1.0,
                    ambient={"type": "product_with_flat", "profile": ONE, "ell": ell})
        assert rep.exact == expected


def test_product_tube_needs_codimension():
    with pytest.raises(PreconditionError):
        bound(theorem="product_tube", m=1, tube_depth=1.0, initial_shape_bound=1.0,
              ambient={"type": "product_with_flat", "profile": ONE, "ell": 1})


def test_product_tube_numeric_infimum():
    # h = cosh t + 2 sinh t: h'/h decreases to 1, infimum at the far end
    rep = bound(theorem="product_tube", m=3, tube_depth=3.0, initial_shape_bound=2.0,
                ambient={"type": "product_with_flat", "profile": ONE, "ell": 1})
    t = 3.0
    ratio = (math.sinh(t) + 2 * math.cosh(t)) / (math.cosh(t) + 2 * math.sinh(t))
    assert rep.bound == pytest.approx(2 / 3 * ratio, abs=1e-12)
    assert rep.attaining_point == pytest.approx(3.0)


def test_focal_radius_inside_tube():
    with pytest.raises(FocalRadiusError) as exc:
        bound(theorem="product_tube", m=2, tube_depth=2.0, initial_shape_bound=0.0,
              ambient={"type": "product_with_flat", "profile": {"kind": "constant", "k": -1.0},
                       "ell": 1})
    assert exc.value.focal_radius == pytest.approx(math.pi / 2, abs=1e-8)


def test_codim_one_tube_cases():
    sinh = bound(theorem="codim_one_tube", m=2, tube=[0.5, 2.0],
                 ambient={"type": "warped_model", "warping": {"name": "sinh", "k": 1.0}})
    assert sinh.bound == pytest.approx(COTH_2, abs=1e-12)
    exp = bound(theorem="codim_one_tube", m=2, tube_depth=4.0,
                ambient={"type": "warped_model", "warping": {"name": "exp", "k": 1.0}})
    assert exp.exact == 1
    cosh = bound(theorem="codim_one_tube", m=2, tube_depth=2.0,
                 ambient={"type": "warped_model", "warping": {"name": "cosh", "k": 1.0}})
    assert cosh.bound == pytest.approx(0.0, abs=1e-14)


def test_codim_one_tabulated_equidistant_curvature():
    rep = bound(theorem="codim_one_tube", m=2, tube=[1.0, 3.0],
                ambient={"type": "warped_model",
                         "equidistant_mean_curvature": {"t": [0, 1, 2, 3, 4],
                                                        "H": [5, 4, 2.5, 3, 0.1]}})
    assert rep.bound == 2.5 and rep.attaining_point == 2.0


@pytest.mark.parametrize("m,kappa,inf,expected", [
    (2, 0, None, Fraction(1, 2)), (2, 0.25, None, Fraction(3, 4)),
    (4, -0.2, 1, Fraction(11, 20))])
def test_submersion(m, kappa, inf, expected):
    data = dict(theorem="submersion", m=m, tube_depth=1.0,
                ambient={"type": "submersion", "profile": ONE, "kappa": kappa})
    if inf is None:
        data["initial_shape_bound"] = 1.0
    else:
        data["inf_log_derivative"] = inf
    assert bound(**data).exact == expected


@pytest.mark.parametrize("m,ell,kappa,expected", [
    (3, 1, 0, Fraction(2, 3)), (2, 0, 0, Fraction(1)), (4, 2, 0.5, Fraction(3, 4))])
def test_submersion_over_hyperbolic(m, ell, kappa, expected):
    rep = bound(theorem="submersion_over_hyperbolic", m=m,
                ambient={"type": "submersion", "ell": ell, "kappa": kappa,
                         "base_curvature_at_least_minus_one": True})
    assert rep.exact == expected


def test_submersion_over_hyperbolic_needs_base_flag():
    with pytest.raises(PreconditionError):
        bound(theorem="submersion_over_hyperbolic", m=3,
              ambient={"type": "submersion", "ell": 1, "kappa": 0})


@pytest.mark.parametrize("m,ell,expected", [(2, 1, Fraction(1, 2)), (5, 1, Fraction(4, 5)),
                                            (7, 3, Fraction(4, 7))])
def test_horocylinder(m, ell, expected):
    rep = bound(theorem="horocylinder", m=m,
                ambient={"type": "hyperbolic_product", "n": 2, "ell": ell})
    assert rep.exact == expected and rep.bound == float(expected)
    assert horocylinder_check(m, ell) == pytest.approx(float(expected), abs=1e-12)


def test_mean_convex_side():
    far = compute_bound(Scenario("mean_convex_side", 2, {"type": "hyperbolic_product", "ell": 1},
                                 sphere_radius=math.inf))
    assert far.exact == Fraction(1, 2) and far.strict
    one = bound(theorem="mean_convex_side", m=3, sphere_radius=1.0)
    assert one.bound == pytest.approx(2 / 3 * COTH_1, abs=1e-12) and one.strict
    two = bound(theorem="mean_convex_side", m=2, sphere_radius=2.0)
    assert two.bound == pytest.approx(COTH_2 / 2, abs=1e-12)


@pytest.mark.parametrize("c,m,ell,expected", [(1, 3, 1, Fraction(2, 3)),
                                              (2, 4, 2, Fraction(1))])
def test_wedge(c, m, ell, expected):
    rep = bound(theorem="wedge", m=m, ambient={"type": "wedge", "c": c, "ell": ell})
    assert rep.exact == expected and not rep.strict


def test_flat_wedge_is_only_positive():
    rep = bound(theorem="wedge", m=2, ambient={"type": "wedge", "c": 0, "ell": 0})
    assert rep.positive and rep.strict and rep.bound == 0.0
    d = rep.to_dict()
    assert d["construction_value"] == pytest.approx(1.0)
    assert "not a theorem constant" in d["construction_label"]


def test_scalar_curvature_condition():
    rho = [10.0 + k for k in range(50)]
    assert check_scalar_curvature_condition([(r, 0.0) for r in rho], 1.0).holds
    cubic = check_scalar_curvature_condition([(r, -r**3) for r in rho], 1.0)
    assert not cubic.holds
    edge = check_scalar_curvature_condition(
        [(r, -4 * r * r * math.log(r + 1)) for r in rho], 2.0)
    assert edge.holds


def test_field_errors_name_the_field():
    with pytest.raises(ValueError, match="'theorem'"):
        Scenario.from_dict({"theorem": "nope", "m": 2, "ambient": {"type": "wedge", "c": 1}})
    with pytest.raises(ValueError, match="'m'"):
        Scenario.from_dict({"theorem": "wedge", "m": 0, "ambient": {"type": "wedge", "c": 1}})
    with pytest.raises(ValueError, match="ambient.c"):
        Scenario.from_dict({"theorem": "wedge", "m": 2, "ambient": {"type": "wedge", "c": -1}})
    with pytest.raises(ValueError, match="'colour'"):
        Scenario.from_dict({"theorem": "wedge", "m": 2, "colour": 1,
                            "ambient": {"type": "wedge", "c": 1}})
    with pytest.raises(ValueError, match="ambient.profile"):
        Scenario.from_dict({"theorem": "submersion", "m": 2,
                            "ambient": {"type": "submersion", "profile": {"k": 1}}})


def test_scenario_json_round_trip_is_stable():
    s = Scenario.from_dict({"theorem": "submersion", "m": 3, "tube_depth": 2.0,
                            "ambient": {"type": "submersion", "profile": ONE, "kappa": 0.25}})
    text = s.to_json()
    assert Scenario.from_json(text).to_json() == text
    r1 = json.dumps(compute_bound(s).to_dict(), sort_keys=True)
    r2 = json.dumps(compute_bound(Scenario.from_json(text)).to_dict(), sort_keys=True)
    assert r1 == r2


def test_render_table():
    reps = [bound(theorem="horocylinder", m=2,
                  ambient={"type": "hyperbolic_product", "n": 2, "ell": 1})]
    table = render_table(reps)
    assert "horocylinder" in table and "1/2" in table and "0.5" in table
