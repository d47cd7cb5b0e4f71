import xml.etree.ElementTree as ET

import numpy as np
import pytest

from comparison_lab import emit_svg, stochastic

NS = {"s": "http://www.w3.org/2000/svg"}


def _points(poly):
    return np.array([[float(v) for v in p.split(",")] for p in poly.get("points").split()])


def test_svg_parses_and_has_one_polyline_per_series(tmp_path):
    x = np.linspace(0, 1, 50)
    text = emit_svg([("a", x, x ** 2), (x, np.sqrt(x))], "x", "y", tmp_path / "p.svg",
                    title="demo & test")
    root = ET.fromstring(text)
    assert root.get("width") == "800" and root.get("height") == "500"
    polys = root.findall("s:polyline", NS)
    assert len(polys) == 2 and len(_points(polys[0])) == 50
    assert (tmp_path / "p.svg").read_text() == text
    assert "demo &amp; test" in text


def test_survival_polyline_is_monotone():
    w = stochastic.model_warping("exp4")
    stats = stochastic.simulate_radial_diffusion(w, 1, 1.0, 2.0, 1e-3, 300, 42)
    curve = stochastic.survival_curve(stats, np.linspace(0, 2, 41))
    root = ET.fromstring(emit_svg([("exp4", [c[0] for c in curve], [c[1] for c in curve])],
                                  "t", "survival"))
    pts = _points(root.find("s:polyline", NS))
    assert np.all(np.diff(pts[:, 0]) > 0)
    assert np.all(np.diff(pts[:, 1]) >= 0)  # SVG y grows downward


def test_non_finite_points_are_dropped():
    root = ET.fromstring(emit_svg([([0, 1, 2], [1.0, np.nan, 3.0])]))
    assert len(_points(root.find("s:polyline", NS))) == 2


def test_bad_series():
    with pytest.raises(ValueError):
        emit_svg([])
    with pytest.raises(ValueError):
        emit_svg([("x", [0, 1], [np.nan, np.inf])])
    with pytest.raises(ValueError):
        emit_svg([("x", [0, 1, 2], [0, 1])])
