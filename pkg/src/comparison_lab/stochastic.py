"""Completeness criterion on curvature profiles and Monte Carlo radial diffusions.

The criterion checks G(0) > 0, G' >= 0 and divergence of the integral of
G^{-1/2} at infinity. The simulator runs Euler-Maruyama for

    dr = dW + (fiber_dim / 2) (h'/h)(r) dt,

the radial part of Brownian motion on the model with warping function h,
and counts paths that pass a large radius before the horizon.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate as sp_integrate

from . import kernels
from .profiles import CurvatureProfile
from .reports import PredicateReport
from .warping import ClosedFormWarping

DIVERGENT, CONVERGENT, INCONCLUSIVE = "divergent", "convergent", "inconclusive"
COMPLETE, INCOMPLETE_SUSPECTED = "complete", "incomplete_suspected"
EXPONENT_BAND = 0.1
CHUNK_FLOATS = 2_000_000


# criterion ----------------------------------------------------------------

@dataclass
class CriterionVerdict:
    g0_positive: bool
    nondecreasing: bool
    integral_divergent: str
    borbely_flag: bool
    overall: str
    tail_exponent: float
    method: str
    notes: list[str] = field(default_factory=list)

    def to_dict(self):
        return {
            "g0_positive": self.g0_positive,
            "nondecreasing": self.nondecreasing,
            "integral_divergent": self.integral_divergent,
            "borbely_flag": self.borbely_flag,
            "overall": self.overall,
            "tail_exponent": self.tail_exponent,
            "method": self.method,
            "notes": list(self.notes),
        }


def _fit_slope(x, y):
    a = np.vstack([np.ones_like(x), x]).T
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    return float(coef[1])


def tail_exponent(G: CurvatureProfile, tail_horizon: float, n=200) -> float:
    """Least-squares p in log G = log C + p log t over [T/4, T]."""
    t = np.geomspace(tail_horizon / 4, tail_horizon, n)
    return _fit_slope(np.log(t), np.log(G(t)))


def _log_correction(G: CurvatureProfile, tail_horizon: float):
    """Decay rate of the integral of G^{-1/2} over successive e-folds of t.

    For G ~ t^2 (log t)^q each e-fold contributes ~ (log t)^{-q/2}, so the
    fitted slope s against log log t is -q/2 and the integral diverges iff
    s >= -1.
    """
    top = math.log(tail_horizon)
    lo = max(1.0, top / 2)
    edges = np.linspace(lo, top, 13)
    incr = []
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = sp_integrate.quad(lambda u: math.exp(u) / math.sqrt(G(math.exp(u))), a, b,
                                   epsrel=1e-10)
        incr.append(val)
    mids = 0.5 * (edges[:-1] + edges[1:])
    return _fit_slope(np.log(mids), np.log(incr))


def _exact_class(G: CurvatureProfile):
    """(verdict, method) for families whose tail behaviour is known in closed form."""
    if G.kind == "constant":
        return (DIVERGENT, "exact: constant profile") if G.params["k"] > 0 else (None, "")
    if G.kind == "power_log":
        return DIVERGENT, "known-answer table: t^2 times squared iterated logarithms"
    if G.kind != "closed_form":
        return None, ""
    name = G.params["name"]
    if name == "polynomial":
        c = np.trim_zeros(np.asarray(G.params["coefficients"], dtype=float), "b")
        if c.size == 0 or c[-1] <= 0:
            return None, ""
        deg = c.size - 1
        return (DIVERGENT if deg <= 2 else CONVERGENT), f"exact: polynomial of degree {deg}"
    if name == "shifted_power":
        p = float(G.params.get("power", 2.0))
        if float(G.params.get("scale", 1.0)) <= 0:
            return None, ""
        return (DIVERGENT if p <= 2 else CONVERGENT), f"exact: power {p:g} tail"
    if name == "exp_power_model":
        p = float(G.params.get("p", 4.0))
        deg = 2 * p - 2
        return (DIVERGENT if deg <= 2 else CONVERGENT), f"exact: power {deg:g} tail"
    return None, ""


def check_criterion(G: CurvatureProfile, tail_horizon: float = 1e4, n_samples=10_000,
                    tol=1e-12) -> CriterionVerdict:
    """Check G(0) > 0, G' >= 0 (sampled) and divergence of int G^{-1/2} at infinity.

    Divergence uses the exact answer for constants, polynomials and the
    power families, the known answer for t^2 times squared iterated logs,
    and otherwise a fitted tail exponent p over [T/4, T]: p < 2 divergent,
    p > 2 convergent, |p - 2| < 0.1 refined by the e-fold decay rate and
    left inconclusive if that is also borderline.
    """
    T = float(tail_horizon)
    if not G.contains(0.0, T):
        raise ValueError(f"profile must be defined on [0, {T}]")
    notes = []
    g0 = G(0.0)
    g0_positive = bool(g0 > 0)
    t = np.linspace(0.0, T, n_samples)
    g = G(t)
    dg = G.derivative(t)
    nondecreasing = bool(np.all(dg >= -tol * (1 + np.abs(g))))
    if not nondecreasing:
        k = int(np.argmin(dg))
        notes.append(f"G' < 0 at t = {t[k]:.6g}")

    positive_tail = bool(np.all(g[t >= T / 4] > 0))
    p = tail_exponent(G, T) if positive_tail else math.nan
    verdict, method = _exact_class(G)
    if verdict is None:
        if not positive_tail:
            verdict, method = INCONCLUSIVE, "G <= 0 on the tail: G^{-1/2} undefined"
            notes.append(method)
        elif p < 2 - EXPONENT_BAND:
            verdict, method = DIVERGENT, f"tail exponent fit p = {p:.4g}"
        elif p > 2 + EXPONENT_BAND:
            verdict, method = CONVERGENT, f"tail exponent fit p = {p:.4g}"
        else:
            s = _log_correction(G, T)
            method = f"tail exponent fit p = {p:.4g}, e-fold decay slope {s:.4g}"
            if s > -0.9:
                verdict = DIVERGENT
            elif s < -1.1:
                verdict = CONVERGENT
            else:
                verdict = INCONCLUSIVE

    borbely = _borbely(G, T) if positive_tail else False
    if g0_positive and nondecreasing and verdict == DIVERGENT:
        overall = COMPLETE
    elif g0_positive and nondecreasing and verdict == CONVERGENT:
        overall = INCOMPLETE_SUSPECTED
    else:
        overall = INCONCLUSIVE
    return CriterionVerdict(g0_positive, nondecreasing, verdict, borbely, overall,
                            p, method, notes)


def _borbely(G: CurvatureProfile, T: float) -> bool:
    """Sampled finiteness of limsup t G(sqrt t) / G(t): growth exponent on [T/4, T] <= 0.05."""
    t = np.geomspace(T / 4, T, 100)
    ratio = t * G(np.sqrt(t)) / G(t)
    return bool(_fit_slope(np.log(t), np.log(ratio)) <= 0.05)


def check_mean_curvature_growth(H_profile, G: CurvatureProfile, B: float,
                                grid=None) -> PredicateReport:
    """|H|(rho) <= B sqrt(G(rho)) at every grid point (default: 1001 points on [0, 100])."""
    rho = np.linspace(0.0, 100.0, 1001) if grid is None else np.asarray(grid, dtype=float)
    H = np.abs(np.asarray([H_profile(r) for r in rho], dtype=float))
    g = np.asarray(G(rho), dtype=float)
    with np.errstate(invalid="ignore"):
        rhs = B * np.sqrt(np.maximum(g, 0.0))
    margin = rhs - H
    notes = [] if np.all(g >= 0) else ["G < 0 on part of the grid"]
    k = int(np.argmin(margin))
    return PredicateReport(bool(np.all(margin >= 0) and np.all(g >= 0)), float(margin[k]),
                           float(rho[k]), int(rho.size), notes)


# radial diffusion --------------------------------------------------------

REFERENCE_MODELS = {
    "sinh": ("sinh", {"k": 1.0}),
    "exp4": ("exp_power", {"a": 1.0, "p": 4.0}),
    "flat": ("linear", {"a": 1.0, "b": 0.0}),
    "euclidean": ("linear", {"a": 0.0, "b": 1.0}),
    "exp": ("exp", {"k": 1.0}),
}


def model_warping(name: str, **params) -> ClosedFormWarping:
    """Named reference model: sinh (hyperbolic), exp4 (h = exp(r^4)), flat (zero drift), ..."""
    try:
        kind, defaults = REFERENCE_MODELS[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; choose from {', '.join(REFERENCE_MODELS)}") \
            from None
    return ClosedFormWarping(kind, {**defaults, **params})


def model_criterion_profile(name: str) -> CurvatureProfile:
    """Curvature profile fed to :func:`check_criterion` for a reference model.

    For sinh this is the model's own G = 1. For exp4 the model's
    G = 16 t^6 + 12 t^2 vanishes at the pole, so the criterion is applied to
    G + 1, which bounds it from above and has the same tail.
    """
    table = {
        "sinh": CurvatureProfile.constant(1.0),
        "exp": CurvatureProfile.constant(1.0),
        "exp4": CurvatureProfile.polynomial([1.0, 0.0, 12.0, 0.0, 0.0, 0.0, 16.0]),
        "flat": CurvatureProfile.constant(0.0),
        "euclidean": CurvatureProfile.constant(0.0),
    }
    try:
        return table[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}") from None


@dataclass
class ExplosionStats:
    paths: int
    T: float
    dt: float
    exploded: int
    survival_probability: float
    mean_exit_time_of_exploded: float
    seed: int
    explosion_radius: float
    domain_exits: int = 0
    absorbed: int = 0
    status: np.ndarray = field(default=None, repr=False)
    exit_times: np.ndarray = field(default=None, repr=False)

    @property
    def explosion_fraction(self) -> float:
        return self.exploded / self.paths

    @property
    def standard_error(self) -> float:
        p = self.survival_probability
        return math.sqrt(p * (1 - p) / self.paths)

    def to_dict(self):
        mean = self.mean_exit_time_of_exploded
        return {
            "paths": self.paths,
            "T": self.T,
            "dt": self.dt,
            "seed": self.seed,
            "explosion_radius": self.explosion_radius,
            "exploded": self.exploded,
            "domain_exits": self.domain_exits,
            "absorbed": self.absorbed,
            "survival_probability": self.survival_probability,
            "standard_error": self.standard_error,
            "mean_exit_time_of_exploded": None if math.isnan(mean) else mean,
        }

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["path_id", "exploded", "exit_time"])
            for i, (st, et) in enumerate(zip(self.status, self.exit_times)):
                w.writerow([i, int(st == kernels.EXPLODED), "" if math.isnan(et) else repr(float(et))])


def path_normals(seed: int, path_index: int, n: int) -> np.ndarray:
    """Standard normals of one path from its own Philox stream keyed by (seed, path index)."""
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be in [0, 2^64)")
    key = (int(seed) << 64) | int(path_index)
    return np.random.Generator(np.random.Philox(key=key)).standard_normal(n)


def _inner_boundary(w, inner):
    lo = w.positivity_interval[0]
    if inner is None:
        if getattr(w, "pole_smooth", False):
            inner = "reflect"
        elif math.isfinite(lo):
            inner = "absorb"
        else:
            inner = "none"
    modes = {"none": kernels.INNER_NONE, "reflect": kernels.INNER_REFLECT,
             "absorb": kernels.INNER_ABSORB}
    if inner not in modes:
        raise ValueError(f"inner boundary must be one of {', '.join(modes)}")
    if inner != "none" and not math.isfinite(lo):
        raise ValueError("no finite inner boundary to reflect or absorb at")
    return modes[inner], (lo if math.isfinite(lo) else 0.0)


def simulate_radial_diffusion(w, fiber_dim: int, r0: float, T: float, dt: float, paths: int,
                              seed: int, explosion_radius: float = 1e3, inner=None,
                              backend=None) -> ExplosionStats:
    """Euler-Maruyama paths of dr = dW + (fiber_dim/2)(h'/h)(r) dt.

    ``inner`` selects the rule at the lower end of the positivity interval:
    "reflect" (default for models smooth at the pole), "absorb" (default for
    other finite inner ends) or "none". Paths whose drift would be evaluated
    outside the solved domain stop as domain exits and are not counted as
    explosions. Each path draws from its own counter-based stream, so results
    do not depend on chunking or evaluation order.
    """
    lo_pos, hi_pos = w.positivity_interval
    if not lo_pos < r0 < hi_pos:
        raise ValueError(f"r0={r0} not inside the positivity interval {w.positivity_interval}")
    if not dt > 0:
        raise ValueError("dt must be > 0")
    if T < 0:
        raise ValueError("T must be >= 0")
    if paths < 1:
        raise ValueError("paths must be >= 1")
    impl = kernels.backend(backend) if backend else kernels
    mode, inner_level = _inner_boundary(w, inner)
    code, p0, p1, knots, hcoef, dhcoef = w.kernel_spec()
    slo, shi = w.solved_interval
    lo = -math.inf if mode != kernels.INNER_NONE else max(lo_pos, slo)
    hi = min(hi_pos, shi)
    coef = 0.5 * fiber_dim
    nsteps = int(round(T / dt))

    status = np.zeros(paths, dtype=np.int8)
    exit_step = np.full(paths, -1, dtype=np.int64)
    if nsteps > 0:
        chunk = max(1, CHUNK_FLOATS // nsteps)
        for start in range(0, paths, chunk):
            stop = min(paths, start + chunk)
            z = np.empty((stop - start, nsteps))
            for i in range(start, stop):
                z[i - start] = path_normals(seed, i, nsteps)
            st, ex, _ = impl.radial_em(z, float(r0), float(dt), coef, code, p0, p1,
                                       knots, hcoef, dhcoef, mode, inner_level, lo, hi,
                                       float(explosion_radius))
            status[start:stop] = st
            exit_step[start:stop] = ex
    exit_times = np.where(exit_step >= 0, (exit_step + 1) * dt, np.nan)
    exploded_mask = status == kernels.EXPLODED
    exploded = int(exploded_mask.sum())
    mean_exit = float(exit_times[exploded_mask].mean()) if exploded else math.nan
    return ExplosionStats(
        paths=paths, T=float(T), dt=float(dt), exploded=exploded,
        survival_probability=1.0 - exploded / paths, mean_exit_time_of_exploded=mean_exit,
        seed=int(seed), explosion_radius=float(explosion_radius),
        domain_exits=int((status == kernels.DOMAIN_EXIT).sum()),
        absorbed=int((status == kernels.ABSORBED).sum()),
        status=status, exit_times=exit_times)


def survival_curve(stats: ExplosionStats, times) -> list[tuple[float, float, float]]:
    """(T, survival, standard error) at each time from one simulation's exit times."""
    rows = []
    for t in times:
        t = float(t)
        if t < 0 or t > stats.T + 1e-12:
            raise ValueError(f"time {t} outside [0, {stats.T}]")
        hit = (stats.status == kernels.EXPLODED) & (stats.exit_times <= t + 1e-12)
        p = 1.0 - hit.sum() / stats.paths
        rows.append((t, p, math.sqrt(p * (1 - p) / stats.paths)))
    return rows


def _log_exp_mean(d):
    """log((e^d - 1)/d), the log of the mean of e^x on [0, d]; stable for any d."""
    d = np.asarray(d, dtype=float)
    out = np.empty_like(d)
    small = np.abs(d) < 1e-6
    out[small] = d[small] / 2 + d[small] ** 2 / 24
    pos = ~small & (d > 0)
    out[pos] = d[pos] + np.log(-np.expm1(-d[pos])) - np.log(d[pos])
    neg = ~small & (d < 0)
    out[neg] = np.log(-np.expm1(d[neg])) - np.log(-d[neg])
    return out


def feller_integral(w, fiber_dim: int, r0: float, R: float, n=20001) -> float:
    """Feller's test integral v(R) = int_{r0}^R 2 int_{r0}^y (h(z)/h(y))^{n-1} dz dy.

    The radial diffusion explodes at +inf with positive probability iff v
    stays bounded as R -> inf. The inner integral is accumulated in log
    space, treating log h^{n-1} as linear on each grid cell, so fast-growing
    h neither overflows nor needs the grid to resolve its growth.
    """
    y = np.linspace(r0, R, n)
    L = fiber_dim * np.asarray(w.log_h(y), dtype=float)
    dy = y[1] - y[0]
    seg = L[:-1] + math.log(dy) + _log_exp_mean(np.diff(L))
    log_inner = np.concatenate([[-np.inf], np.logaddexp.accumulate(seg)])
    outer = 2.0 * np.exp(log_inner - L)
    return float(np.sum(0.5 * (outer[:-1] + outer[1:])) * dy)
