"""Warping functions h solving h'' - G h = 0, focal radii, Sturm comparison and barriers.

Two concrete warping types share one interface:

* :class:`WarpingFunction` - numerical solution from :func:`solve_jacobi`,
  stored as per-step quintic Hermite pieces of (h, h') in a rescaled form so
  that fast-growing solutions do not overflow (only h'/h is scale free).
* :class:`ClosedFormWarping` - the textbook models (sinh, exp, cosh, sin,
  affine, exp(a t^p)) used as references and as fast drifts for the
  radial diffusion.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate as sp_integrate
from scipy import optimize

from . import kernels
from ._ode import integrate, polyder_rows, polyint_rows, polyval_rows, quintic_coefficients
from .errors import DomainError, IntegrationError
from .profiles import CurvatureProfile
from .reports import ComparisonReport

DEFAULT_HORIZON = (-50.0, 50.0)
ZERO_XTOL = 1e-12


class _WarpingBase:
    """Shared behaviour: domain checks, sampling, CSV export."""

    profile: CurvatureProfile
    positivity_interval: tuple[float, float]
    solved_interval: tuple[float, float]
    t0: float

    def inside(self, t) -> np.ndarray:
        """Mask of points in the open positivity interval and the solved range."""
        t = np.asarray(t, dtype=float)
        lo, hi = self.positivity_interval
        slo, shi = self.solved_interval
        return (t > lo) & (t < hi) & (t >= slo) & (t <= shi)

    def log_derivative(self, t):
        """h'(t)/h(t); raises DomainError outside the positivity interval."""
        t_arr = np.asarray(t, dtype=float)
        if not np.all(self.inside(t_arr)):
            raise DomainError(
                f"h'/h requested outside the positivity interval "
                f"{self.positivity_interval} (solved on {self.solved_interval})")
        return self.ratio(t)

    def sample(self, n=1001, interval=None):
        lo, hi = interval if interval is not None else self.solved_interval
        t = np.linspace(lo, hi, n)
        h = self.h(t)
        dh = self.dh(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(self.inside(t), self.ratio(t), np.nan)
        return t, h, dh, ratio

    def to_csv(self, path, n=1001, interval=None):
        t, h, dh, ratio = self.sample(n, interval)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "h", "dh", "ratio"])
            for row in zip(t, h, dh, ratio):
                w.writerow([repr(float(x)) for x in row])

    def ddh(self, t):
        return self.profile(t) * self.h(t)


@dataclass(eq=False)
class WarpingFunction(_WarpingBase):
    """Dense numerical solution of h'' = G h.

    Piece ``i`` covers ``[knots[i], knots[i+1]]``; ``hcoef[i]``/``dhcoef[i]``
    are quintic coefficients in s = (t - knots[i]) / width for h and h'
    divided by ``exp(logscale[i])``.
    """

    profile: CurvatureProfile
    t0: float
    h0: float
    dh0: float
    knots: np.ndarray
    hcoef: np.ndarray
    dhcoef: np.ndarray
    logscale: np.ndarray
    positivity_interval: tuple[float, float]
    lower_unbounded: bool
    upper_unbounded: bool
    degenerate_zeros: list[float] = field(default_factory=list)
    truncated: bool = False
    horizon: tuple[float, float] = DEFAULT_HORIZON

    def __post_init__(self):
        self.solved_interval = (float(self.knots[0]), float(self.knots[-1]))
        widths = np.diff(self.knots)
        # cumulative integral of h at knots, absolute scale
        piece = widths * np.exp(self.logscale) * polyint_rows(self.hcoef, 1.0)
        self._cum = np.concatenate([[0.0], np.cumsum(piece)])

    def _locate(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.solved_interval
        tol = 1e-12 * max(1.0, abs(lo), abs(hi))
        if np.any(t < lo - tol) or np.any(t > hi + tol):
            raise DomainError(f"t outside solved interval [{lo}, {hi}]")
        i = np.clip(np.searchsorted(self.knots, t, side="right") - 1, 0, len(self.knots) - 2)
        width = self.knots[i + 1] - self.knots[i]
        s = (t - self.knots[i]) / width
        return t, i, s, width

    def _scaled(self, t, which, order=0):
        t, i, s, width = self._locate(t)
        coef = self.hcoef[i] if which == "h" else self.dhcoef[i]
        if order == 0:
            val = polyval_rows(coef, s)
        else:
            val = polyder_rows(coef, s, order) / width**order
        return val, i

    def _out(self, val):
        return float(val) if np.ndim(val) == 0 else val

    def h(self, t):
        val, i = self._scaled(t, "h")
        return self._out(val * np.exp(self.logscale[i]))

    def dh(self, t):
        val, i = self._scaled(t, "dh")
        return self._out(val * np.exp(self.logscale[i]))

    def ratio(self, t):
        hv, _ = self._scaled(t, "h")
        dv, _ = self._scaled(t, "dh")
        with np.errstate(divide="ignore", invalid="ignore"):
            return self._out(dv / hv)

    def log_h(self, t):
        val, i = self._scaled(t, "h")
        with np.errstate(divide="ignore"):
            return self._out(np.log(np.abs(val)) + self.logscale[i])

    def residual(self, t):
        """|h'' - G h| / (1 + |h|) with h'' taken from the dense h' piece."""
        d2, i = self._scaled(t, "dh", order=1)
        hv, _ = self._scaled(t, "h")
        scale = np.exp(self.logscale[i])
        res = np.abs(d2 - self.profile(t) * hv) * scale / (1.0 + np.abs(hv) * scale)
        return self._out(res)

    def integral(self, a, b):
        """int_a^b h(t) dt."""
        return self._primitive(b) - self._primitive(a)

    def _primitive(self, t):
        t, i, s, width = self._locate(t)
        part = width * np.exp(self.logscale[i]) * polyint_rows(self.hcoef[i], s)
        return self._out(self._cum[i] + part)

    def kernel_spec(self):
        return (kernels.TABLE, 0.0, 0.0, self.knots, self.hcoef, self.dhcoef)

    @property
    def pole_smooth(self) -> bool:
        lo = self.positivity_interval[0]
        return bool(self.h0 == 0.0 and lo == self.t0 and abs(self.dh0 - 1.0) < 1e-12)

    def __repr__(self):
        return (f"WarpingFunction({self.profile!r}, t0={self.t0}, h0={self.h0}, "
                f"dh0={self.dh0}, positivity={self.positivity_interval})")


def _jacobi_rhs(profile):
    def rhs(t, y):
        return np.array([y[1], profile(t) * y[0]])
    return rhs


def _piece(profile, ta, tb, ya, yb):
    """Quintic pieces for h and h' on [ta, tb] from endpoint states (same scale)."""
    ga, gb = profile(ta), profile(tb)
    dga, dgb = profile.derivative(ta), profile.derivative(tb)
    width = tb - ta
    hc = quintic_coefficients(ya[0], ya[1], ga * ya[0], yb[0], yb[1], gb * yb[0], width)
    dc = quintic_coefficients(ya[1], ga * ya[0], dga * ya[0] + ga * ya[1],
                              yb[1], gb * yb[0], dgb * yb[0] + gb * yb[1], width)
    return hc, dc


def _sweep(profile, t0, y0, t_end, rtol, atol, max_steps, skip_start_zero, stop_at_zero=True):
    """Integrate one direction; stop one step after the first zero of h unless told otherwise."""
    state = {"log": 0.0, "pending": 0.0}

    def renorm(y):
        nrm = abs(y[0]) + abs(y[1])
        state["pending"] = math.log(nrm)
        return y / nrm

    pieces = []
    zero = None
    degenerate = False
    steps = 0
    truncated = False
    direction = 1.0 if t_end > t0 else -1.0
    norm0 = abs(y0[0]) + abs(y0[1])
    y_start = np.asarray(y0, dtype=float) / norm0
    state["log"] = math.log(norm0)
    for step in integrate(_jacobi_rhs(profile), t0, y_start, t_end,
                          rtol=rtol, atol=atol, max_steps=max_steps, project=renorm):
        steps += 1
        ta, tb, ya, yb = step.t0, step.t1, step.y0, step.y1
        if direction < 0:
            ta, tb, ya, yb = tb, ta, yb, ya
        # the projection of the previous step runs just before this one is yielded
        state["log"] += state["pending"]
        state["pending"] = 0.0
        hc, dc = _piece(profile, ta, tb, ya, yb)
        pieces.append((ta, tb, hc, dc, state["log"]))
        h_start, h_end = step.y0[0], step.y1[0]
        first = steps == 1 and skip_start_zero
        if (zero is None and (h_start > 0 or first) and h_end <= 0
                and not (first and h_end == 0)):
            zero, degenerate = _refine_zero(hc, dc, ta, tb, direction)
            if stop_at_zero:
                break
    else:
        truncated = steps >= max_steps
    return pieces, zero, degenerate, truncated


def _refine_zero(hc, dc, ta, tb, direction):
    width = tb - ta

    def f(t):
        return polyval_rows(hc, (t - ta) / width)

    fa, fb = f(ta), f(tb)
    if fa == 0.0:
        root = ta
    elif fb == 0.0:
        root = tb
    else:
        root = optimize.brentq(f, ta, tb, xtol=ZERO_XTOL, rtol=4 * np.finfo(float).eps)
    slope = polyval_rows(dc, (root - ta) / width)
    scale = max(abs(polyval_rows(hc, 0.0)), abs(polyval_rows(dc, 0.0)), 1e-300)
    degenerate = abs(slope) < 1e-8 * scale
    return float(root), bool(degenerate)


def solve_jacobi(profile: CurvatureProfile, t0: float = 0.0, h0: float = 1.0,
                 dh0: float = 0.0, horizon=DEFAULT_HORIZON, *, rtol=1e-10,
                 atol=1e-12, max_steps=200_000, stop_at_zero=True) -> WarpingFunction:
    """Solve h'' = G h with h(t0) = h0, h'(t0) = dh0 on ``horizon``.

    Integration in each direction stops one step after the first zero of h
    (located by bracketed root refinement on the dense output), at the
    horizon, or after ``max_steps`` accepted steps (``truncated`` is then
    set). With ``stop_at_zero=False`` the solution continues through its
    zeros to the horizon; the positivity interval is unchanged. A zero at
    which h' also vanishes is recorded in
    ``degenerate_zeros`` instead of being used as a focal radius.

    Raises IntegrationError (carrying the last valid t) on step-size
    underflow.
    """
    a, b = map(float, horizon)
    t0, h0, dh0 = float(t0), float(h0), float(dh0)
    if not a <= t0 <= b:
        raise ValueError(f"t0={t0} outside horizon {horizon}")
    if not profile.contains(a, b):
        raise DomainError(f"profile domain {profile.domain} does not cover horizon {horizon}")
    if h0 < 0:
        raise ValueError("h0 must be >= 0 (positivity interval is taken around t0)")
    if h0 == 0 and dh0 == 0:
        raise ValueError("h0 = dh0 = 0 gives the trivial solution")

    y0 = np.array([h0, dh0])
    do_forward = not (h0 == 0 and dh0 < 0) and b > t0
    do_backward = not (h0 == 0 and dh0 > 0) and a < t0

    fwd = bwd = ([], None, False, False)
    if do_forward:
        fwd = _sweep(profile, t0, y0, b, rtol, atol, max_steps, h0 == 0, stop_at_zero)
    if do_backward:
        bwd = _sweep(profile, t0, y0, a, rtol, atol, max_steps, h0 == 0, stop_at_zero)
    if not fwd[0] and not bwd[0]:
        raise ValueError("empty integration range")

    pieces = list(reversed(bwd[0])) + list(fwd[0])
    knots = np.array([p[0] for p in pieces] + [pieces[-1][1]])
    hcoef = np.array([p[2] for p in pieces])
    dhcoef = np.array([p[3] for p in pieces])
    logscale = np.array([p[4] for p in pieces])

    degenerate = []
    upper_zero = fwd[1]
    if fwd[2]:
        degenerate.append(upper_zero)
        upper_zero = None
    lower_zero = bwd[1]
    if bwd[2]:
        degenerate.append(lower_zero)
        lower_zero = None

    if h0 == 0 and dh0 > 0:
        lower = t0
    elif h0 == 0 and dh0 < 0:
        upper_zero = t0
        lower = lower_zero if lower_zero is not None else -math.inf
    else:
        lower = lower_zero if lower_zero is not None else -math.inf
    upper = upper_zero if upper_zero is not None else math.inf
    if h0 == 0 and dh0 < 0:
        upper = t0

    return WarpingFunction(
        profile=profile, t0=t0, h0=h0, dh0=dh0, knots=knots, hcoef=hcoef,
        dhcoef=dhcoef, logscale=logscale, positivity_interval=(lower, upper),
        lower_unbounded=lower == -math.inf, upper_unbounded=upper == math.inf,
        degenerate_zeros=degenerate, truncated=fwd[3] or bwd[3],
        horizon=(a, b))


# closed forms --------------------------------------------------------------

@dataclass(eq=False)
class ClosedFormWarping(_WarpingBase):
    """Analytic warping functions.

    ``name`` is one of ``sinh`` (h = A sinh(k t), A defaults to 1/k),
    ``exp`` (e^{k t}), ``cosh`` (cosh(k t)), ``sin`` (A sin(k t)),
    ``linear`` (a + b t) or ``exp_power`` (exp(a t^p)).
    """

    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        p = {k: float(v) for k, v in self.params.items()}
        n = self.name
        if n == "sinh":
            k = p.setdefault("k", 1.0)
            p.setdefault("A", 1.0 / k)
            self.profile = CurvatureProfile.constant(k * k)
            self.positivity_interval = (0.0, math.inf)
        elif n == "exp":
            k = p.setdefault("k", 1.0)
            self.profile = CurvatureProfile.constant(k * k)
            self.positivity_interval = (-math.inf, math.inf)
        elif n == "cosh":
            k = p.setdefault("k", 1.0)
            self.profile = CurvatureProfile.constant(k * k)
            self.positivity_interval = (-math.inf, math.inf)
        elif n == "sin":
            k = p.setdefault("k", 1.0)
            p.setdefault("A", 1.0 / k)
            self.profile = CurvatureProfile.constant(-k * k)
            self.positivity_interval = (0.0, math.pi / k)
        elif n == "linear":
            a = p.setdefault("a", 0.0)
            b = p.setdefault("b", 1.0)
            self.profile = CurvatureProfile.constant(0.0)
            if b > 0:
                self.positivity_interval = (-a / b, math.inf)
            elif b < 0:
                self.positivity_interval = (-math.inf, -a / b)
            else:
                if a <= 0:
                    raise ValueError("constant warping must be positive")
                self.positivity_interval = (-math.inf, math.inf)
        elif n == "exp_power":
            a = p.setdefault("a", 1.0)
            pw = p.setdefault("p", 4.0)
            self.profile = CurvatureProfile.closed_form("exp_power_model", a=a, p=pw)
            lo = -math.inf if pw.is_integer() and pw >= 3 else 0.0
            self.positivity_interval = (lo, math.inf)
        else:
            raise ValueError(f"unknown closed-form warping {n!r}")
        self.params = p
        self.solved_interval = (-math.inf, math.inf)
        lo = self.positivity_interval[0]
        self.t0 = lo if math.isfinite(lo) else 0.0

    def h(self, t):
        t = np.asarray(t, dtype=float)
        p, n = self.params, self.name
        if n == "sinh":
            out = p["A"] * np.sinh(p["k"] * t)
        elif n == "exp":
            out = np.exp(p["k"] * t)
        elif n == "cosh":
            out = np.cosh(p["k"] * t)
        elif n == "sin":
            out = p["A"] * np.sin(p["k"] * t)
        elif n == "linear":
            out = p["a"] + p["b"] * t
        else:
            out = np.exp(p["a"] * t ** p["p"])
        return float(out) if out.ndim == 0 else out

    def dh(self, t):
        t = np.asarray(t, dtype=float)
        p, n = self.params, self.name
        if n == "sinh":
            out = p["A"] * p["k"] * np.cosh(p["k"] * t)
        elif n == "exp":
            out = p["k"] * np.exp(p["k"] * t)
        elif n == "cosh":
            out = p["k"] * np.sinh(p["k"] * t)
        elif n == "sin":
            out = p["A"] * p["k"] * np.cos(p["k"] * t)
        elif n == "linear":
            out = np.full_like(t, p["b"])
        else:
            out = p["a"] * p["p"] * t ** (p["p"] - 1) * np.exp(p["a"] * t ** p["p"])
        return float(out) if out.ndim == 0 else out

    def ratio(self, t):
        t = np.asarray(t, dtype=float)
        p, n = self.params, self.name
        with np.errstate(divide="ignore", invalid="ignore"):
            if n == "sinh":
                out = p["k"] / np.tanh(p["k"] * t)
            elif n == "exp":
                out = np.full_like(t, p["k"])
            elif n == "cosh":
                out = p["k"] * np.tanh(p["k"] * t)
            elif n == "sin":
                out = p["k"] / np.tan(p["k"] * t)
            elif n == "linear":
                out = p["b"] / (p["a"] + p["b"] * t)
            else:
                out = p["a"] * p["p"] * t ** (p["p"] - 1)
        return float(out) if out.ndim == 0 else out

    def log_h(self, t):
        t = np.asarray(t, dtype=float)
        p, n = self.params, self.name
        with np.errstate(divide="ignore", invalid="ignore"):
            if n == "sinh":
                x = np.abs(p["k"] * t)
                # log sinh x without overflow
                out = np.log(p["A"]) + x + np.log1p(-np.exp(-2 * x)) - math.log(2)
            elif n == "exp":
                out = p["k"] * t
            elif n == "cosh":
                x = np.abs(p["k"] * t)
                out = x + np.log1p(np.exp(-2 * x)) - math.log(2)
            elif n == "sin":
                out = np.log(p["A"] * np.sin(p["k"] * t))
            elif n == "linear":
                out = np.log(p["a"] + p["b"] * t)
            else:
                out = p["a"] * t ** p["p"]
        return float(out) if out.ndim == 0 else out

    def integral(self, a, b):
        """int_a^b h(t) dt, analytic where available."""
        p, n = self.params, self.name

        def prim(t):
            if n == "sinh":
                return p["A"] * np.cosh(p["k"] * t) / p["k"]
            if n == "exp":
                return np.exp(p["k"] * t) / p["k"] if p["k"] != 0 else t
            if n == "cosh":
                return np.sinh(p["k"] * t) / p["k"]
            if n == "sin":
                return -p["A"] * np.cos(p["k"] * t) / p["k"]
            if n == "linear":
                return p["a"] * t + 0.5 * p["b"] * t * t
            return None

        if prim(0.0) is None:
            return float(sp_integrate.quad(self.h, a, b, epsabs=1e-13, epsrel=1e-12)[0])
        out = prim(np.asarray(b, dtype=float)) - prim(np.asarray(a, dtype=float))
        return float(out) if np.ndim(out) == 0 else out

    def residual(self, t):
        # exact closed forms satisfy the equation identically
        return np.zeros_like(np.asarray(t, dtype=float))

    @property
    def pole_smooth(self) -> bool:
        n, p = self.name, self.params
        if n in ("sinh", "sin"):
            return abs(p["A"] * p["k"] - 1.0) < 1e-12
        if n == "linear":
            return p["a"] == 0.0 and p["b"] == 1.0
        return False

    def kernel_spec(self):
        p, n = self.params, self.name
        empty_k = np.zeros(2)
        empty_c = np.zeros((1, 6))
        code, p0, p1 = {
            "sinh": (kernels.SINH, p.get("k"), 0.0),
            "exp": (kernels.EXP, p.get("k"), 0.0),
            "cosh": (kernels.COSH, p.get("k"), 0.0),
            "sin": (kernels.SIN, p.get("k"), 0.0),
            "linear": (kernels.LINEAR, p.get("a"), p.get("b")),
            "exp_power": (kernels.EXP_POWER, p.get("a"), p.get("p")),
        }[n]
        return (code, float(p0), float(p1), empty_k, empty_c, empty_c)

    def to_dict(self):
        return {"name": self.name, **self.params}

    def __repr__(self):
        return f"ClosedFormWarping({self.name!r}, {self.params})"


# operations ---------------------------------------------------------------

def log_derivative(w, t):
    """h'(t)/h(t) inside the positivity interval."""
    return w.log_derivative(t)


def inf_log_derivative(w, a: float, b: float, *, n=1025, return_argmin=False):
    """Infimum of h'/h over [a, b].

    If h vanishes at a (a = d_*, h' > 0) the ratio tends to +inf there and
    the endpoint does not compete. The derivative of h'/h is G - (h'/h)^2;
    when that has one sign on the sampling grid the infimum is taken at the
    matching endpoint, otherwise the grid minimum is polished with a bounded
    scalar minimisation.
    """
    a, b = float(a), float(b)
    if a > b:
        raise ValueError(f"empty interval [{a}, {b}]")
    lo, hi = w.positivity_interval
    slo, shi = w.solved_interval
    if a < lo or b >= hi or a < slo or b > shi:
        raise DomainError(f"[{a}, {b}] not inside positivity interval {w.positivity_interval}")
    left_open = a == lo
    if a == b:
        if left_open:
            raise DomainError("h vanishes at the single requested point")
        val = float(w.ratio(a))
        return (val, a) if return_argmin else val

    t = np.linspace(a, b, n)
    if left_open:
        t = t[1:]
    phi = np.asarray(w.ratio(t), dtype=float)
    slope = np.asarray(w.profile(t), dtype=float) - phi * phi
    tol = 1e-12 * (1 + np.abs(phi) ** 2)
    if np.all(slope >= -tol):
        # nondecreasing: infimum at the left end (approached if a is a zero)
        arg = t[0] if not left_open else a
        val = float(phi[0]) if not left_open else float(w.ratio(t[0]))
        if left_open:
            # h'/h -> +inf at a zero with h' > 0; nondecreasing is impossible
            # there unless the grid is too coarse, so fall through to search
            pass
        else:
            return (val, float(arg)) if return_argmin else val
    if np.all(slope <= tol):
        val = float(w.ratio(b))
        return (val, b) if return_argmin else val

    k = int(np.argmin(phi))
    best_t, best = float(t[k]), float(phi[k])
    lo_b = t[max(k - 1, 0)]
    hi_b = t[min(k + 1, len(t) - 1)]
    if hi_b > lo_b:
        res = optimize.minimize_scalar(lambda x: float(w.ratio(x)), bounds=(lo_b, hi_b),
                                       method="bounded", options={"xatol": 1e-12})
        if res.fun < best:
            best_t, best = float(res.x), float(res.fun)
    for end in ((b,) if left_open else (a, b)):
        v = float(w.ratio(end))
        if v < best:
            best_t, best = end, v
    return (best, best_t) if return_argmin else best


def sturm_compare(w1, w2, *, n=2001, tol=1e-7) -> ComparisonReport:
    """Check h1'/h1 <= h2'/h2 forward of the shared initial point when G1 <= G2."""
    notes = []
    t0 = w1.t0
    if abs(w2.t0 - t0) > 1e-12:
        return ComparisonReport(math.nan, math.nan, None, hypotheses_met=False,
                                tolerance=tol, notes=["different initial points"])
    lo = max(w1.positivity_interval[0], w2.positivity_interval[0], t0,
             w1.solved_interval[0], w2.solved_interval[0])
    hi = min(w1.positivity_interval[1], w2.positivity_interval[1],
             w1.solved_interval[1], w2.solved_interval[1])
    if not (math.isfinite(hi) and hi > lo):
        return ComparisonReport(math.nan, math.nan, None, hypotheses_met=False,
                                tolerance=tol, notes=["no common positivity interval"])
    for w in (w1, w2):
        if not w.profile.is_even(t_max=min(5.0, hi - lo)):
            notes.append("non-even profile: comparison restricted to t >= t0")
            break

    span = hi - lo
    t = np.linspace(lo, hi, n)[1:-1]
    t = t[(t - lo > 1e-9 * span) & (hi - t > 1e-9 * span)]
    g1, g2 = w1.profile(t), w2.profile(t)
    ordered = bool(np.all(g1 <= g2 + 1e-12 * (1 + np.abs(g2))))

    # initial log-derivatives: equal, or both infinite (zero start, same sign)
    h10, h20 = float(w1.h(t0)), float(w2.h(t0))
    if h10 == 0.0 or h20 == 0.0:
        same_start = h10 == h20 == 0.0
    else:
        r1, r2 = float(w1.ratio(t0)), float(w2.ratio(t0))
        same_start = abs(r1 - r2) <= 1e-10 * (1 + abs(r1))
    if not ordered or not same_start:
        if not ordered:
            notes.append("profiles not ordered (G1 <= G2 fails on the sample grid)")
        if not same_start:
            notes.append("initial log-derivatives differ")
        return ComparisonReport(math.nan, math.nan, None, hypotheses_met=False,
                                tolerance=tol, notes=notes)

    margin = np.asarray(w2.ratio(t)) - np.asarray(w1.ratio(t))
    k = int(np.argmin(margin))
    m = float(margin[k])
    return ComparisonReport(m, float(t[k]), bool(m >= -tol), hypotheses_met=True,
                            tolerance=tol, notes=notes)


# barriers -----------------------------------------------------------------

@dataclass(frozen=True)
class Truncation:
    """Clamp levels for a barrier: g(clip(t, lower, upper)).

    ``lower=0, upper=d`` is the tube clamp; ``upper=r`` alone is the wedge
    clamp (constant value g(r) on the far component).
    """

    lower: float | None = None
    upper: float | None = None

    @classmethod
    def tube(cls, d):
        return cls(0.0, float(d))

    @classmethod
    def wedge(cls, radius):
        return cls(None, float(radius))


@dataclass(eq=False)
class BarrierFunction:
    """g(t) = offset + int_{rho0}^t h, optionally clamped."""

    base: object
    rho0: float
    truncation: Truncation | None = None
    offset: float = 0.0

    def _clip(self, t):
        t = np.asarray(t, dtype=float)
        if self.truncation is None:
            return t
        lo = -np.inf if self.truncation.lower is None else self.truncation.lower
        hi = np.inf if self.truncation.upper is None else self.truncation.upper
        return np.clip(t, lo, hi)

    def untruncated(self, t):
        out = self.offset + self.base.integral(self.rho0, np.asarray(t, dtype=float))
        return float(out) if np.ndim(out) == 0 else out

    def __call__(self, t):
        return self.untruncated(self._clip(t))

    def active(self, t):
        """Mask of points strictly inside the unclamped region."""
        t = np.asarray(t, dtype=float)
        if self.truncation is None:
            return np.ones_like(t, dtype=bool)
        lo = -np.inf if self.truncation.lower is None else self.truncation.lower
        hi = np.inf if self.truncation.upper is None else self.truncation.upper
        return (t > lo) & (t < hi)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        out = np.where(self.active(t), self.base.h(t), 0.0)
        return float(out) if out.ndim == 0 else out

    def second_derivative(self, t):
        t = np.asarray(t, dtype=float)
        out = np.where(self.active(t), self.base.dh(t), 0.0)
        return float(out) if out.ndim == 0 else out


def build_barrier(w, rho0: float, truncation: Truncation | None = None,
                  offset: float = 0.0) -> BarrierFunction:
    """Primitive of h from ``rho0`` with an optional clamp."""
    slo, shi = w.solved_interval
    if not slo <= rho0 <= shi:
        raise DomainError(f"rho0={rho0} outside solved interval {w.solved_interval}")
    if truncation is not None:
        for level in (truncation.lower, truncation.upper):
            if level is not None and not slo <= level <= shi:
                raise DomainError(f"truncation level {level} outside solved interval")
        if (truncation.lower is not None and truncation.upper is not None
                and truncation.lower > truncation.upper):
            raise ValueError("truncation lower level above upper level")
    return BarrierFunction(w, float(rho0), truncation, float(offset))


def wedge_barrier(c: float, radius: float | None = None) -> BarrierFunction:
    """t^2/2 when c = 0 and cosh(c t)/c when c > 0 (h = g' = t or sinh(c t))."""
    if c < 0:
        raise ValueError("c must be >= 0")
    trunc = Truncation.wedge(radius) if radius is not None else None
    if c == 0:
        return build_barrier(ClosedFormWarping("linear", {"a": 0.0, "b": 1.0}), 0.0, trunc)
    base = ClosedFormWarping("sinh", {"k": c, "A": 1.0})
    return build_barrier(base, 0.0, trunc, offset=1.0 / c)
