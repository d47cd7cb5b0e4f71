"""Rotational constant mean curvature graphs u(r) over hyperbolic space times a line.

With S(r) = int_0^r sinh^{n-1} and the flux

    I = sinh^{n-1}(r) u'/sqrt(1 + u'^2) - n H S(r),

graphs meeting the axis orthogonally have I = 0, hence
u'/sqrt(1 + u'^2) = n H F(r) with F = S / sinh^{n-1}. F increases from 0 to
1/(n - 1), so the slope blows up at a finite radius r0 exactly when
H > (n - 1)/n.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate as sp_integrate
from scipy import optimize

SERIES_RADIUS = 1e-3
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(48)
# segment quadrature for u
_SEG_NODES, _SEG_WEIGHTS = np.polynomial.legendre.leggauss(10)


@dataclass(frozen=True)
class CmcParams:
    n: int
    H: float
    I: float = 0.0

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 2:
            raise ValueError("n must be an integer >= 2")
        if self.H < 0:
            raise ValueError("H must be >= 0 (upward orientation)")

    @property
    def threshold(self) -> float:
        return (self.n - 1) / self.n

    @property
    def regime(self) -> str:
        # exact rational comparison of H with (n - 1)/n
        lhs, rhs = self.n * self.H, self.n - 1
        if lhs > rhs:
            return "critical"
        if lhs == rhs:
            return "salavessa"
        return "subcritical"


def F(r, n: int):
    """F(r) = int_0^r sinh^{n-1} / sinh^{n-1}(r), vectorised.

    n = 2 uses tanh(r/2); otherwise a series below r = 1e-3 and a
    composite Gauss-Legendre rule on the scaled integrand
    (sinh t / sinh r)^{n-1} elsewhere.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be >= 0")
    if n == 2:
        out = np.tanh(r / 2)
        return float(out) if out.ndim == 0 else out
    k = n - 1
    flat = np.atleast_1d(r).ravel()
    out = np.empty_like(flat)
    small = flat < SERIES_RADIUS
    rs = flat[small]
    out[small] = rs / n - (n - 1) * rs**3 / (3 * n * (n + 2))
    rb = flat[~small]
    if rb.size:
        log_sinh_r = _log_sinh(rb)
        total = np.zeros_like(rb)
        cut = np.maximum(rb - 8.0, 0.0)
        for a, b in ((np.zeros_like(rb), cut), (cut, rb)):
            half = 0.5 * (b - a)
            tau = 0.5 * (a + b)[:, None] + half[:, None] * _GL_NODES[None, :]
            vals = np.exp(k * (_log_sinh(tau) - log_sinh_r[:, None]))
            total += half * (vals @ _GL_WEIGHTS)
        out[~small] = total
    out = out.reshape(np.shape(r))
    return float(out) if out.ndim == 0 else out


def _log_sinh(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return x + np.log1p(-np.exp(-2 * x)) - math.log(2)


def F_recurrence(r: float, n: int) -> float:
    """F from S_k = sinh^{k-1} cosh / k - (k-1)/k S_{k-2} (k = n - 1); for moderate r only."""
    k = n - 1
    s = math.sinh(r)
    # F_j = S_j / sinh^j with F_0 = r, F_1 = (cosh r - 1)/sinh r
    f = [r, (math.cosh(r) - 1) / s]
    for j in range(2, k + 1):
        f.append(1 / (j * math.tanh(r)) - (j - 1) / j * f[j - 2] / (s * s))
    return f[k]


def sinh_power_integral(r: float, n: int) -> float:
    """S(r) = int_0^r sinh^{n-1}, closed form for n = 2, adaptive quadrature otherwise."""
    if r == 0:
        return 0.0
    if n == 2:
        return math.cosh(r) - 1.0
    val, _ = sp_integrate.quad(lambda t: math.sinh(t) ** (n - 1), 0.0, r,
                               epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def flux(r, u_prime, params: CmcParams) -> float:
    """sinh^{n-1}(r) u'/sqrt(1 + u'^2) - n H S(r); u' = inf means a vertical tangent."""
    if r < 0:
        raise ValueError("r must be >= 0")
    if r == 0:
        return 0.0
    psi = 1.0 if math.isinf(u_prime) else u_prime / math.sqrt(1.0 + u_prime * u_prime)
    if math.isinf(u_prime) and u_prime < 0:
        psi = -1.0
    k = params.n - 1
    return math.sinh(r) ** k * psi - params.n * params.H * sinh_power_integral(r, params.n)


def slope(r, params: CmcParams):
    """u'(r) = n H F / sqrt(1 - (n H F)^2) for the I = 0 graph (inf at and past r0)."""
    q = params.n * params.H * np.asarray(F(r, params.n))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(q < 1.0, q / np.sqrt(np.maximum(1.0 - q * q, 0.0)), np.inf)
    return float(out) if out.ndim == 0 else out


def critical_radius(params: CmcParams, xtol=1e-14):
    """Root r0 of n H F(r) = 1, or None when H <= (n - 1)/n."""
    if params.regime != "critical":
        return None
    n, H = params.n, params.H
    if n == 2:
        # 2 H tanh(r/2) = 1
        return 2.0 * math.atanh(1.0 / (2.0 * H))
    g = lambda r: n * H * F(r, n) - 1.0  # noqa: E731
    hi = 1.0
    while g(hi) <= 0:
        hi *= 2.0
        if hi > 1e3:
            raise RuntimeError("failed to bracket the critical radius")
    return float(optimize.brentq(g, 0.0, hi, xtol=xtol, rtol=4 * np.finfo(float).eps))


@dataclass
class ProfileCurve:
    """Sampled profile (r, u, u') with flux trace; ``mirror_u`` is the reflected branch."""

    params: CmcParams
    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    regime: str
    critical_radius: float | None = None
    max_height: float | None = None
    mirror_u: np.ndarray | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def closed(self) -> bool:
        return self.mirror_u is not None

    @property
    def total_height(self) -> float | None:
        return None if self.max_height is None else 2.0 * self.max_height

    def flux_trace(self) -> np.ndarray:
        return np.array([flux(float(r), float(d), self.params) for r, d in zip(self.r, self.du)])

    def flux_deviation(self) -> float:
        trace = self.flux_trace()
        return float(np.max(np.abs(trace - trace[0])))

    def to_csv(self, path):
        trace = self.flux_trace()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["r", "u", "du", "flux"])
            for row in zip(self.r, self.u, self.du, trace):
                w.writerow([repr(float(x)) for x in row])

    def summary(self) -> dict:
        return {
            "n": self.params.n,
            "H": self.params.H,
            "I": self.params.I,
            "regime": self.regime,
            "critical_radius": self.critical_radius,
            "max_height": self.max_height,
            "total_height": self.total_height,
            "samples": int(self.r.size),
            "r_end": float(self.r[-1]),
            "notes": list(self.notes),
        }


def _segment_integrals(a, b, fn, nodes=_SEG_NODES, weights=_SEG_WEIGHTS):
    half = 0.5 * (b - a)
    x = 0.5 * (a + b)[:, None] + half[:, None] * nodes[None, :]
    return half * (fn(x) @ weights)


def _height_increments(r, params, r0, nodes=_SEG_NODES, weights=_SEG_WEIGHTS):
    """int over [r_i, r_{i+1}] of u', in s = sqrt(r0 - r) when r0 is given."""
    if r0 is None:
        return _segment_integrals(r[:-1], r[1:], lambda x: slope(x, params), nodes, weights)
    s = np.sqrt(np.maximum(r0 - r, 0.0))
    nH, n = params.n * params.H, params.n

    def integrand(sv):
        q = nH * F(r0 - sv * sv, n)
        # u' 2 s, finite as s -> 0
        return 2.0 * sv * q / np.sqrt(np.maximum(1.0 - q * q, 1e-300))

    # s decreases along r, so integrate from s_{i+1} to s_i
    return _segment_integrals(s[1:], s[:-1], integrand, nodes, weights)


def integrate_profile(params: CmcParams, r_max: float, samples: int = 2001) -> ProfileCurve:
    """I = 0 graph from u(0) = 0 up to r_max or the critical radius, whichever is first.

    If the critical radius r0 is reached the curve ends there with u'(r0) =
    inf and records r0 and the height u(r0); samples are then placed at
    r = r0 - s^2 with s uniform, which also turns the inverse-square-root
    singularity of u' into a smooth integrand.
    """
    if params.I != 0:
        raise ValueError("integrate_profile covers the I = 0 family only")
    if not r_max > 0:
        raise ValueError("r_max must be > 0")
    if samples < 5:
        raise ValueError("need at least 5 samples")
    r0 = critical_radius(params)
    notes = []
    regime = params.regime
    if regime == "subcritical":
        notes.append("subcritical: no entire graph with a vertical end; I = 0 integrated anyway")
    if r0 is not None and r0 <= r_max:
        s = np.linspace(math.sqrt(r0), 0.0, samples)
        r = r0 - s * s
        r[0], r[-1] = 0.0, r0
        inc = _height_increments(r, params, r0)
        end = r0
    else:
        r = np.linspace(0.0, r_max, samples)
        inc = _height_increments(r, params, None)
        end = None
    u = np.concatenate([[0.0], np.cumsum(inc)])
    du = np.asarray(slope(r, params), dtype=float)
    if end is not None:
        du[-1] = np.inf
    return ProfileCurve(params, r, u, du, regime, critical_radius=end,
                        max_height=float(u[-1]) if end is not None else None, notes=notes)


def build_cmc_sphere(params: CmcParams, samples: int = 2001) -> ProfileCurve:
    """Graph up to the critical radius plus its mirror image u_mirror = 2 u(r0) - u."""
    r0 = critical_radius(params)
    if r0 is None:
        raise ValueError(f"no critical radius for H = {params.H} <= (n-1)/n")
    curve = integrate_profile(params, r0, samples)
    # cross-check the height with a higher-order segment rule
    nodes, weights = np.polynomial.legendre.leggauss(20)
    height2 = float(np.sum(_height_increments(curve.r, params, r0, nodes, weights)))
    diff = abs(height2 - curve.max_height)
    curve.notes.append(f"height cross-check (10 vs 20 point rule): {diff:.3g}")
    if diff > 1e-9 * max(1.0, curve.max_height):
        raise RuntimeError(f"quadrature near the critical radius disagrees by {diff:.3g}")
    curve.mirror_u = 2.0 * curve.max_height - curve.u
    return curve


def integrate_flux_profile(params: CmcParams, r_start: float, du_start: float, r_end: float,
                           samples: int = 1001) -> ProfileCurve:
    """General flux solution from the divergence form psi' = n H - (n - 1) coth(r) psi.

    psi = u'/sqrt(1 + u'^2). Used for I != 0 (e.g. minimal catenoid-type
    profiles with H = 0); stops early if |psi| reaches 1.
    """
    if not 0 < r_start < r_end:
        raise ValueError("need 0 < r_start < r_end")
    n, H = params.n, params.H
    psi0 = du_start / math.sqrt(1 + du_start * du_start)

    def rhs(r, y):
        psi = y[0]
        d = psi / math.sqrt(max(1 - psi * psi, 1e-300))
        return [n * H - (n - 1) / math.tanh(r) * psi, d]

    def vertical(r, y):
        return 1.0 - abs(y[0]) - 1e-9
    vertical.terminal = True

    grid = np.linspace(r_start, r_end, samples)
    sol = sp_integrate.solve_ivp(rhs, (r_start, r_end), [psi0, 0.0], method="DOP853",
                                 t_eval=grid, rtol=1e-12, atol=1e-14, events=vertical)
    psi = sol.y[0]
    du = psi / np.sqrt(1 - psi * psi)
    I0 = flux(r_start, du_start, params)
    curve = ProfileCurve(CmcParams(n, H, I0), sol.t, sol.y[1], du, params.regime)
    if sol.status == 1:
        curve.notes.append(f"vertical tangent reached near r = {sol.t_events[0][0]:.12g}")
    return curve


@dataclass
class MeanCurvatureReport:
    max_deviation: float
    r_argmax: float
    passed: bool
    tolerance: float
    checked: int

    def to_dict(self):
        return {"max_deviation": self.max_deviation, "r_argmax": self.r_argmax,
                "pass": self.passed, "tolerance": self.tolerance, "checked": self.checked}


def verify_profile_mean_curvature(curve: ProfileCurve, params: CmcParams | None = None,
                                  tol=1e-4, max_slope=10.0, r_min=0.5) -> MeanCurvatureReport:
    """Recompute H from the sampled u alone and compare with the target.

    u' is re-derived from u by second-order finite differences, then
    H = d/dr[sinh^{n-1} u'/sqrt(1 + u'^2)] / (n sinh^{n-1}) by a second
    finite difference. Points with r < r_min (where the quotient is 0/0) or
    with |u'| > max_slope (next to a vertical tangent) are skipped.
    """
    params = params or curve.params
    r, u = np.asarray(curve.r, dtype=float), np.asarray(curve.u, dtype=float)
    if r.size < 5:
        raise ValueError("too few samples to differentiate")
    k = params.n - 1
    du = np.gradient(u, r, edge_order=2)
    psi = du / np.sqrt(1 + du * du)
    phi = np.sinh(r) ** k * psi
    dphi = np.gradient(phi, r, edge_order=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        H_rec = dphi / (params.n * np.sinh(r) ** k)
    stored = np.abs(np.asarray(curve.du, dtype=float))
    ok = (r >= r_min) & (stored <= max_slope) & np.isfinite(H_rec)
    ok[:2] = False
    ok[-2:] = False
    if not np.any(ok):
        raise ValueError("no admissible interior samples")
    dev = np.where(ok, np.abs(H_rec - params.H), -np.inf)
    i = int(np.argmax(dev))
    return MeanCurvatureReport(float(dev[i]), float(r[i]), bool(dev[i] < tol), tol, int(ok.sum()))
