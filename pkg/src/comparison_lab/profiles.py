"""Curvature-bound functions G(t) with derivative access and JSON round-trip."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError

KINDS = ("constant", "power_log", "tabulated", "closed_form")


def _iterated_logs(t, depth):
    """Return [log t, log log t, ...] (depth entries)."""
    out = []
    x = t
    for _ in range(depth):
        x = np.log(x)
        out.append(x)
    return out


def _tower(k):
    """exp(exp(...exp(1))) with k exponentials; log^(k+1) t > 0 iff t > _tower(k)."""
    x = 1.0
    for _ in range(k):
        x = math.exp(x)
    return x


def _polynomial(coefficients):
    # scalar Horner fast path: profiles are evaluated per step inside ODE loops
    c = np.asarray(coefficients, dtype=float)
    hi_first = c[::-1].copy()
    dc = np.polynomial.polynomial.polyder(c)[::-1].copy()
    hi_list = hi_first.tolist()

    def g(t):
        if isinstance(t, float):
            acc = 0.0
            for a in hi_list:
                acc = acc * t + a
            return acc
        return np.polyval(hi_first, t)

    def dg(t):
        return np.polyval(dc, t)

    return g, dg, (-math.inf, math.inf)


def _shifted_power(scale=1.0, shift=1.0, power=2.0):
    def g(t):
        return scale * (shift + t) ** power

    def dg(t):
        return scale * power * (shift + t) ** (power - 1)

    lo = -math.inf if float(power).is_integer() and power >= 0 else -shift
    return g, dg, (lo, math.inf)


def _exp_power_model(a=1.0, p=4.0):
    """G for which h = exp(a t^p) solves h'' = G h."""

    def g(t):
        return (a * p * t ** (p - 1)) ** 2 + a * p * (p - 1) * t ** (p - 2)

    def dg(t):
        return (2 * (a * p) ** 2 * (p - 1) * t ** (2 * p - 3)
                + a * p * (p - 1) * (p - 2) * t ** (p - 3))

    lo = -math.inf if float(p).is_integer() and p >= 3 else 0.0
    return g, dg, (lo, math.inf)


CLOSED_FORMS = {
    "polynomial": _polynomial,
    "shifted_power": _shifted_power,
    "exp_power_model": _exp_power_model,
}


@dataclass(frozen=True, eq=False)
class CurvatureProfile:
    """The function G in h'' - G h = 0.

    Build with the classmethods (:meth:`constant`, :meth:`power_log`,
    :meth:`tabulated`, :meth:`closed_form`) or :meth:`from_dict`. Calls are
    vectorised; evaluation outside :attr:`domain` raises ``DomainError``.
    """

    kind: str
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown profile kind {self.kind!r}")
        g, dg, domain = getattr(self, f"_build_{self.kind}")(**self.params)
        object.__setattr__(self, "_g", g)
        object.__setattr__(self, "_dg", dg)
        object.__setattr__(self, "domain", domain)

    # constructors
    @classmethod
    def constant(cls, k: float) -> "CurvatureProfile":
        return cls("constant", {"k": float(k)})

    @classmethod
    def power_log(cls, scale=1.0, depth=1, t_min=3.0) -> "CurvatureProfile":
        return cls("power_log", {"scale": float(scale), "depth": int(depth),
                                 "t_min": float(t_min)})

    @classmethod
    def tabulated(cls, t, G, interpolation="cubic") -> "CurvatureProfile":
        return cls("tabulated", {"t": [float(x) for x in t], "G": [float(x) for x in G],
                                 "interpolation": interpolation})

    @classmethod
    def closed_form(cls, name: str, **params) -> "CurvatureProfile":
        return cls("closed_form", {"name": name, **params})

    @classmethod
    def polynomial(cls, coefficients) -> "CurvatureProfile":
        return cls.closed_form("polynomial", coefficients=[float(c) for c in coefficients])

    # builders
    @staticmethod
    def _build_constant(k):
        k = float(k)
        return (lambda t: np.full_like(np.asarray(t, dtype=float), k),
                lambda t: np.zeros_like(np.asarray(t, dtype=float)),
                (-math.inf, math.inf))

    @staticmethod
    def _build_power_log(scale=1.0, depth=1, t_min=3.0):
        if depth < 0:
            raise ValueError("depth must be >= 0")
        need = _tower(depth - 1) if depth >= 1 else 0.0
        if depth >= 1 and t_min <= need:
            raise ValueError(
                f"t_min={t_min} leaves an iterated logarithm non-positive for depth "
                f"{depth}; need t_min > {need:.6g}")

        def core(t):
            logs = _iterated_logs(t, depth)
            out = scale * t * t
            for lg in logs:
                out = out * lg * lg
            return out

        def dcore(t):
            logs = _iterated_logs(t, depth)
            rate = 2.0 / t
            prod = 1.0
            for lg in logs:
                # d/dt log^(i) t = 1 / (t * prod_{j<i} log^(j) t)
                rate = rate + 2.0 / (t * prod * lg)
                prod = prod * lg
            return core(t) * rate

        g_min = float(core(np.float64(t_min)))

        def g(t):
            t = np.asarray(t, dtype=float)
            tt = np.maximum(t, t_min)
            return np.where(t >= t_min, core(tt), g_min)

        def dg(t):
            t = np.asarray(t, dtype=float)
            tt = np.maximum(t, t_min)
            return np.where(t >= t_min, dcore(tt), 0.0)

        return g, dg, (-math.inf, math.inf)

    @staticmethod
    def _build_tabulated(t, G, interpolation="cubic"):
        t = np.asarray(t, dtype=float)
        G = np.asarray(G, dtype=float)
        if t.ndim != 1 or t.shape != G.shape or t.size < 2:
            raise ValueError("tabulated profile needs matching 1-d arrays of length >= 2")
        if np.any(np.diff(t) <= 0):
            raise ValueError("tabulated grid must be strictly increasing")
        if not np.all(np.isfinite(G)):
            raise ValueError("tabulated values must be finite")
        if interpolation == "cubic" and t.size >= 4:
            spline = CubicSpline(t, G)
            deriv = spline.derivative()
            return spline, deriv, (float(t[0]), float(t[-1]))
        if interpolation not in ("linear", "cubic"):
            raise ValueError(f"unknown interpolation {interpolation!r}")
        slopes = np.diff(G) / np.diff(t)

        def g(x):
            return np.interp(x, t, G)

        def dg(x):
            i = np.clip(np.searchsorted(t, x, side="right") - 1, 0, t.size - 2)
            return slopes[i]

        return g, dg, (float(t[0]), float(t[-1]))

    @staticmethod
    def _build_closed_form(name, **params):
        try:
            factory = CLOSED_FORMS[name]
        except KeyError:
            raise ValueError(f"unknown closed-form profile {name!r}") from None
        return factory(**params)

    # evaluation
    def _check(self, t):
        lo, hi = self.domain
        t = np.asarray(t, dtype=float)
        slack = 1e-12 * max(1.0, abs(lo) if math.isfinite(lo) else 1.0,
                            abs(hi) if math.isfinite(hi) else 1.0)
        if np.any(t < lo - slack) or np.any(t > hi + slack):
            raise DomainError(f"t outside profile domain [{lo}, {hi}]")
        return t

    def __call__(self, t):
        if isinstance(t, (float, int)):
            lo, hi = self.domain
            if lo <= t <= hi:
                if self.kind == "constant":
                    return float(self.params["k"])
                return float(self._g(float(t)))
        t = self._check(t)
        out = self._g(t)
        return float(out) if np.ndim(out) == 0 else np.asarray(out, dtype=float)

    def derivative(self, t):
        t = self._check(t)
        out = self._dg(t)
        return float(out) if np.ndim(out) == 0 else np.asarray(out, dtype=float)

    def contains(self, a, b=None) -> bool:
        lo, hi = self.domain
        b = a if b is None else b
        return lo <= min(a, b) and max(a, b) <= hi

    def is_even(self, t_max=5.0, n=257, rtol=1e-12) -> bool:
        """Sampled check of G(t) == G(-t) on [0, t_max] (within the domain)."""
        lo, hi = self.domain
        t_max = min(t_max, -lo, hi)
        if t_max <= 0:
            return False
        t = np.linspace(0.0, t_max, n)
        a, b = self(t), self(-t)
        return bool(np.all(np.abs(a - b) <= rtol * (1 + np.abs(a))))

    # serialisation
    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}

    @classmethod
    def from_dict(cls, data: dict) -> "CurvatureProfile":
        data = dict(data)
        try:
            kind = data.pop("kind")
        except KeyError:
            raise ValueError("profile object is missing field 'kind'") from None
        return cls(kind, data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CurvatureProfile":
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        return isinstance(other, CurvatureProfile) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(json.dumps(self.to_dict(), sort_keys=True))

    def __repr__(self):
        inner = ", ".join(f"{k}={v!r}" for k, v in self.params.items()
                          if not isinstance(v, list) or len(v) < 8)
        return f"CurvatureProfile.{self.kind}({inner})"
