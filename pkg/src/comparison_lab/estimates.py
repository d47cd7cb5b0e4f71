"""Mean-curvature lower bounds computed from a scenario description.

Each ``bound_*`` function takes a :class:`Scenario` and returns an
:class:`EstimateReport`. Constants that depend only on rational inputs are
computed with :class:`fractions.Fraction` (decimal inputs are read through
their shortest repr, so ``0.25`` is exactly 1/4); anything that goes
through h'/h of a numerically solved warping function is a float.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .errors import FocalRadiusError, PreconditionError
from .profiles import CurvatureProfile
from .reports import PredicateReport
from .warping import ClosedFormWarping, inf_log_derivative, solve_jacobi

THEOREMS = (
    "product_tube",
    "codim_one_tube",
    "submersion",
    "submersion_over_hyperbolic",
    "horocylinder",
    "mean_convex_side",
    "wedge",
)
AMBIENTS = ("warped_model", "product_with_flat", "submersion", "hyperbolic_product", "wedge")

# horizon used when the tube is unbounded (d -> infinity)
FAR_HORIZON = 50.0


def exact(x) -> Fraction | None:
    """Exact rational value of a user number, or None for non-finite input."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("boolean is not a number")
    if isinstance(x, int):
        return Fraction(x)
    x = float(x)
    if not math.isfinite(x):
        return None
    return Fraction(repr(x))


def _fraction_str(q: Fraction | None):
    if q is None:
        return None
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _field_error(name, message):
    return ValueError(f"scenario field '{name}': {message}")


@dataclass
class Scenario:
    """One theorem instance.

    ``ambient`` is a dict with a ``type`` key and the type's parameters:

    * ``warped_model``: ``profile`` (or ``warping`` closed form), ``fiber_dim``,
      optional ``equidistant_mean_curvature`` table ``{"t": [...], "H": [...]}``
    * ``product_with_flat``: ``profile``, ``n``, ``ell``
    * ``submersion``: ``profile``, ``kappa``; for the hyperbolic-base bound
      also ``ell`` and ``base_curvature_at_least_minus_one``
    * ``hyperbolic_product``: ``n``, ``ell``
    * ``wedge``: ``c``, ``aperture``, ``ell``
    """

    theorem: str
    m: int
    ambient: dict[str, Any]
    tube_depth: float | None = None
    tube: tuple[float, float] | None = None
    initial_shape_bound: float | None = None
    inf_log_derivative: float | None = None
    sphere_radius: float | None = None
    construction_radius: float = 1.0

    def __post_init__(self):
        if self.theorem not in THEOREMS:
            raise _field_error("theorem", f"unknown value {self.theorem!r}; expected one of "
                               f"{', '.join(THEOREMS)}")
        if isinstance(self.m, bool) or not isinstance(self.m, int) or self.m < 1:
            raise _field_error("m", "must be a positive integer")
        if not isinstance(self.ambient, dict) or "type" not in self.ambient:
            raise _field_error("ambient.type", "missing")
        if self.ambient["type"] not in AMBIENTS:
            raise _field_error("ambient.type", f"unknown value {self.ambient['type']!r}")
        if self.tube_depth is not None and not self.tube_depth > 0:
            raise _field_error("tube_depth", "must be > 0")
        if self.tube is not None:
            self.tube = tuple(float(x) for x in self.tube)
            if len(self.tube) != 2 or not self.tube[0] < self.tube[1]:
                raise _field_error("tube", "must be [d1, d2] with d1 < d2")
        a = self.ambient
        if a["type"] == "wedge":
            c = a.get("c")
            if c is None or float(c) < 0:
                raise _field_error("ambient.c", "must be >= 0")
            ap = a.get("aperture", 0.5)
            if not 0 < float(ap) < 1:
                raise _field_error("ambient.aperture", "must lie in (0, 1)")
        if "ell" in a and (isinstance(a["ell"], bool) or not isinstance(a["ell"], int)
                           or a["ell"] < 0):
            raise _field_error("ambient.ell", "must be a nonnegative integer")
        if "profile" in a and not isinstance(a["profile"], CurvatureProfile):
            try:
                a["profile"] = CurvatureProfile.from_dict(a["profile"])
            except (ValueError, TypeError) as exc:
                raise _field_error("ambient.profile", str(exc)) from None

    @property
    def ell(self) -> int:
        return int(self.ambient.get("ell", 0))

    @property
    def profile(self) -> CurvatureProfile | None:
        return self.ambient.get("profile")

    def to_dict(self) -> dict:
        amb = dict(self.ambient)
        if isinstance(amb.get("profile"), CurvatureProfile):
            amb["profile"] = amb["profile"].to_dict()
        out = {"theorem": self.theorem, "m": self.m, "ambient": amb}
        for key in ("tube_depth", "tube", "initial_shape_bound", "inf_log_derivative",
                    "sphere_radius"):
            val = getattr(self, key)
            if val is not None:
                out[key] = list(val) if key == "tube" else val
        if self.theorem == "wedge":
            out["construction_radius"] = self.construction_radius
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        if not isinstance(data, dict):
            raise ValueError("scenario must be a JSON object")
        known = {"theorem", "m", "ambient", "tube_depth", "tube", "initial_shape_bound",
                 "inf_log_derivative", "sphere_radius", "construction_radius"}
        extra = set(data) - known
        if extra:
            raise _field_error(sorted(extra)[0], "unknown field")
        kwargs = dict(data)
        if data.get("theorem") == "mean_convex_side":
            # the sphere-cylinder barrier lives in hyperbolic space times a line
            kwargs.setdefault("ambient", {"type": "hyperbolic_product", "ell": 1})
        for key in ("theorem", "m", "ambient"):
            if key not in kwargs:
                raise _field_error(key, "missing")
        if not isinstance(kwargs["ambient"], dict):
            raise _field_error("ambient", "must be an object")
        kwargs["ambient"] = dict(kwargs["ambient"])
        return cls(**kwargs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"scenario is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "Scenario":
        with open(path) as fh:
            return cls.from_json(fh.read())


@dataclass
class EstimateReport:
    """A lower bound for sup |H|.

    ``strict`` marks a strict inequality (sup |H| > bound). ``exact`` holds
    the rational value when every input was rational. For the c = 0 wedge the
    theorem only gives positivity; ``construction_value`` then carries the
    barrier-dependent number, which is not a theorem constant.
    """

    bound: float
    theorem: str
    exact: Fraction | None = None
    strict: bool = False
    attaining_point: float | None = None
    positive: bool | None = None
    construction_value: float | None = None
    inputs: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {
            "theorem": self.theorem,
            "bound": self.bound,
            "exact": _fraction_str(self.exact),
            "strict": self.strict,
            "attaining_point": self.attaining_point,
        }
        if self.positive is not None:
            out["positive"] = self.positive
        if self.construction_value is not None:
            out["construction_value"] = self.construction_value
            out["construction_label"] = "construction-dependent, not a theorem constant"
        out["inputs"] = self.inputs
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _report(s: Scenario, value, **kw) -> EstimateReport:
    if isinstance(value, Fraction):
        return EstimateReport(float(value), s.theorem, exact=value, inputs=s.to_dict(), **kw)
    return EstimateReport(float(value), s.theorem, inputs=s.to_dict(), **kw)


def _require_codim(s: Scenario, ell: int):
    if s.m < ell + 1:
        raise PreconditionError(f"needs m >= ell + 1, got m={s.m}, ell={ell}")


def _require_ambient(s: Scenario, *types):
    if s.ambient["type"] not in types:
        raise PreconditionError(
            f"theorem {s.theorem!r} needs ambient type {' or '.join(types)}, got "
            f"{s.ambient['type']!r}")


def _lambda0(s: Scenario) -> float:
    """Initial shape bound; defaults to the horosphere/geodesic-sphere value for constant G."""
    if s.initial_shape_bound is not None:
        return float(s.initial_shape_bound)
    prof = s.profile
    if prof is None or prof.kind != "constant" or prof.params["k"] <= 0:
        raise _field_error("initial_shape_bound", "required unless G is a positive constant")
    root = math.sqrt(prof.params["k"])
    if s.sphere_radius is not None:
        return root / math.tanh(root * float(s.sphere_radius))
    return root


def _exact_ratio(prof: CurvatureProfile, lam0: float):
    """For constant G = k and lambda0 = sqrt(k) (h = exp(sqrt(k) t)), h'/h is exactly lambda0."""
    if prof.kind == "constant" and lam0 > 0 and lam0 * lam0 == prof.params["k"]:
        return exact(lam0)
    return None


def _tube_interval(s: Scenario):
    if s.tube is not None:
        return s.tube
    if s.tube_depth is None:
        raise _field_error("tube_depth", "required (or give 'tube': [d1, d2])")
    return (0.0, float(s.tube_depth))


def _inf_ratio(s: Scenario):
    """(inf of h'/h over the tube, argmin, exact value or None, notes)."""
    if s.inf_log_derivative is not None:
        v = s.inf_log_derivative
        return float(v), None, exact(v), ["inf h'/h taken from the scenario"]
    prof = s.profile
    if prof is None:
        raise _field_error("ambient.profile", "required to solve for h")
    lam0 = _lambda0(s)
    a, b = _tube_interval(s)
    q = _exact_ratio(prof, lam0)
    if q is not None:
        return float(q), a, q, [f"h = exp({lam0!r} t): h'/h is constant"]
    w = solve_jacobi(prof, a, 1.0, lam0, horizon=(a, b))
    upper = w.positivity_interval[1]
    if upper <= b:
        raise FocalRadiusError(f"h vanishes inside the tube [{a}, {b}]", upper)
    val, arg = inf_log_derivative(w, a, b, return_argmin=True)
    return val, arg, None, []


def _scaled(factor: Fraction, inf_val, inf_exact):
    if inf_exact is not None:
        return factor * inf_exact
    return float(factor) * inf_val


def bound_product_tube(s: Scenario) -> EstimateReport:
    """((m - ell)/m) inf_[0,d] h'/h for a tube in a product with a flat factor."""
    _require_ambient(s, "product_with_flat")
    ell = s.ell
    _require_codim(s, ell)
    val, arg, q, notes = _inf_ratio(s)
    return _report(s, _scaled(Fraction(s.m - ell, s.m), val, q), attaining_point=arg,
                   notes=notes)


def _tabulated_hd(s: Scenario, a, b):
    table = s.ambient["equidistant_mean_curvature"]
    t = np.asarray(table["t"], dtype=float)
    H = np.asarray(table["H"], dtype=float)
    mask = (t >= a) & (t <= b)
    if not np.any(mask):
        raise _field_error("ambient.equidistant_mean_curvature", "no samples inside the tube")
    k = int(np.argmin(np.where(mask, H, np.inf)))
    return float(H[k]), float(t[k])


def bound_codim_one_tube(s: Scenario) -> EstimateReport:
    """inf of the equidistant mean curvature H_d over the tube (hypersurface case)."""
    _require_ambient(s, "warped_model")
    a, b = _tube_interval(s)
    fiber = s.ambient.get("fiber_dim")
    if fiber is not None and s.m != int(fiber):
        raise PreconditionError(f"hypersurface needs m = fiber_dim = {fiber}, got m={s.m}")
    if "equidistant_mean_curvature" in s.ambient:
        val, arg = _tabulated_hd(s, a, b)
        return _report(s, val, attaining_point=arg,
                       notes=["H_d supplied as data (not derivable from G alone)"])
    spec = s.ambient.get("warping")
    if spec is not None:
        spec = dict(spec)
        w = ClosedFormWarping(spec.pop("name"), spec)
        lo, hi = w.positivity_interval
        if a < lo or b >= hi:
            raise FocalRadiusError(f"tube [{a}, {b}] leaves the positivity interval",
                                   lo if a < lo else hi)
        if w.name == "exp":
            q = exact(w.params["k"])
            return _report(s, q, attaining_point=a, notes=["H_d = h'/h is constant"])
        val, arg = inf_log_derivative(w, a, b, return_argmin=True)
        return _report(s, val, attaining_point=arg, notes=["warped model: H_d = h'/h"])
    val, arg, q, notes = _inf_ratio(s)
    return _report(s, q if q is not None else val, attaining_point=arg,
                   notes=notes + ["warped model: H_d = h'/h"])


def bound_submersion(s: Scenario) -> EstimateReport:
    """((m - 1)/m) inf h'/h + kappa for a submersion with fiber mean curvature kappa."""
    _require_ambient(s, "submersion")
    kappa = s.ambient.get("kappa", 0)
    val, arg, q, notes = _inf_ratio(s)
    kq = exact(kappa)
    base = _scaled(Fraction(s.m - 1, s.m), val, q)
    if isinstance(base, Fraction) and kq is not None:
        value = base + kq
    else:
        value = float(base) + float(kappa)
    return _report(s, value, attaining_point=arg, notes=notes)


def bound_submersion_over_hyperbolic(s: Scenario) -> EstimateReport:
    """(m - ell)/m + (ell/m) inf kappa for a submersion over hyperbolic space."""
    _require_ambient(s, "submersion")
    ell = s.ell
    _require_codim(s, ell)
    if not s.ambient.get("base_curvature_at_least_minus_one", False):
        raise PreconditionError(
            "needs the flag ambient.base_curvature_at_least_minus_one (K_N >= -1)")
    kappa = s.ambient.get("kappa", 0)
    kq = exact(kappa)
    if kq is not None:
        value = Fraction(s.m - ell, s.m) + Fraction(ell, s.m) * kq
    else:
        value = (s.m - ell) / s.m + ell / s.m * float(kappa)
    return _report(s, value, notes=["horosphere barrier: h = e^t, h'/h = 1"])


def horocylinder_check(m: int, ell: int, depth=FAR_HORIZON) -> float:
    """Numerical value ((m - ell)/m) inf h'/h for h solving h'' = h, h(0) = h'(0) = 1."""
    w = solve_jacobi(CurvatureProfile.constant(1.0), 0.0, 1.0, 1.0, horizon=(0.0, depth))
    return (m - ell) / m * inf_log_derivative(w, 0.0, depth)


def bound_horocylinder(s: Scenario) -> EstimateReport:
    """(m - ell)/m in a hyperbolic space times a flat factor (horocylinder barrier)."""
    _require_ambient(s, "hyperbolic_product")
    ell = s.ell
    _require_codim(s, ell)
    value = Fraction(s.m - ell, s.m)
    numeric = horocylinder_check(s.m, ell)
    notes = [f"numerical cross-check from h = e^t on [0, {FAR_HORIZON:g}]: {numeric!r}"]
    if abs(numeric - float(value)) > 1e-12:
        notes.append("cross-check deviates by more than 1e-12")
    return _report(s, value, attaining_point=0.0, notes=notes)


def bound_mean_convex_side(s: Scenario) -> EstimateReport:
    """((m - 1)/m) coth d0 from a geodesic-sphere cylinder barrier of radius d0 (strict)."""
    d0 = s.sphere_radius
    if d0 is None:
        raise _field_error("sphere_radius", "required")
    d0 = float(d0)
    if not d0 > 0:
        raise PreconditionError(f"sphere radius must be > 0, got {d0}")
    factor = Fraction(s.m - 1, s.m)
    notes = [f"strict: m |H| > m - 1, i.e. sup |H| > {_fraction_str(factor)}"]
    if math.isinf(d0):
        return _report(s, factor, strict=True, notes=notes)
    return _report(s, float(factor) / math.tanh(d0), strict=True, attaining_point=d0,
                   notes=notes)


def bound_wedge(s: Scenario) -> EstimateReport:
    """(m - ell) c / m for c > 0; only strict positivity for c = 0."""
    _require_ambient(s, "wedge")
    ell = s.ell
    _require_codim(s, ell)
    c = s.ambient["c"]
    cq = exact(c)
    if float(c) > 0:
        value = Fraction(s.m - ell, s.m) * cq if cq is not None else (s.m - ell) * float(c) / s.m
        return _report(s, value, notes=["barrier cosh(c t)/c, h'/h = c coth(c t) >= c"])
    t0 = float(s.construction_radius)
    if not t0 > 0:
        raise _field_error("construction_radius", "must be > 0")
    # barrier t^2/2: h = t, h'/h = 1/t, infimum over (0, t0] at t0
    construction = (s.m - ell) / s.m / t0
    return _report(s, Fraction(0), strict=True, positive=True, attaining_point=t0,
                   construction_value=construction,
                   notes=["c = 0: sup |H| > 0 only; construction value depends on t0"])


_DISPATCH = {
    "product_tube": bound_product_tube,
    "codim_one_tube": bound_codim_one_tube,
    "submersion": bound_submersion,
    "submersion_over_hyperbolic": bound_submersion_over_hyperbolic,
    "horocylinder": bound_horocylinder,
    "mean_convex_side": bound_mean_convex_side,
    "wedge": bound_wedge,
}


def compute_bound(s: Scenario) -> EstimateReport:
    return _DISPATCH[s.theorem](s)


def check_scalar_curvature_condition(samples, c: float, threshold: float = 10.0,
                                     rtol: float = 1e-12) -> PredicateReport:
    """Check s >= -c^2 rho^2 log(rho + 1) on samples (rho, s) with rho >= threshold.

    Samples below ``threshold`` are ignored (the condition is asymptotic).
    Equality is accepted up to a relative rounding allowance ``rtol``.
    """
    arr = np.asarray(samples, dtype=float).reshape(-1, 2)
    rho, scal = arr[:, 0], arr[:, 1]
    if np.any(rho < 0):
        raise ValueError("radii must be >= 0")
    mask = rho >= threshold
    if not np.any(mask):
        return PredicateReport(True, math.inf, None, 0, [f"no samples with rho >= {threshold}"])
    rho, scal = rho[mask], scal[mask]
    rhs = -(c * c) * rho * rho * np.log1p(rho)
    margin = scal - rhs
    allowance = rtol * np.maximum(np.abs(rhs), np.abs(scal))
    k = int(np.argmin(margin))
    return PredicateReport(bool(np.all(margin >= -allowance)), float(margin[k]),
                           float(rho[k]), int(mask.sum()))


def render_table(reports) -> str:
    """Plain-text table of estimate reports."""
    rows = [("theorem", "bound", "exact", "strict", "attained at")]
    for r in reports:
        rows.append((r.theorem, f"{r.bound:.12g}", _fraction_str(r.exact) or "-",
                     "yes" if r.strict else "no",
                     "-" if r.attaining_point is None else f"{r.attaining_point:.6g}"))
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)
