"""Pointwise check of the Laplacian inequalities for f = g(rho) on parametrised surfaces.

For a surface (m = 2) in a 3-dimensional chart with signed distance rho,
f = g(rho) with g' = h, two lower bounds for Delta f / h are checked:

* tube form:    (n - 1) H_d - (n - 1) h'/h - m |H| + m h'/h,
  valid when the Hessian of rho on the equidistants is <= (h'/h) Id;
* reverse form: m (h'/h - |H|),
  valid when that Hessian is >= (h'/h) Id.

Each chart carries, per form, a hard-coded certificate: the profile G and
initial value fixing h, with a one-line derivation of the Hessian bound.
Geometry (induced metric, second fundamental form, Laplace-Beltrami) is
computed by central differences on a structured grid with two ghost layers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .profiles import CurvatureProfile
from .warping import ClosedFormWarping, build_barrier

GHOST = 2
CHRISTOFFEL_STEP = 1e-5
TOL_FACTOR = 10.0
FORMS = ("tube", "reverse")


@dataclass(frozen=True)
class Certificate:
    """Comparison data under which one inequality form holds on a chart."""

    profile: CurvatureProfile
    warping: ClosedFormWarping
    derivation: str


@dataclass(eq=False)
class AmbientChart:
    """3-dimensional chart with metric, signed distance and equidistant mean curvature.

    ``metric`` maps points (..., 3) to matrices (..., 3, 3); ``rho`` maps
    points to the signed distance; ``H_d`` maps rho to the mean curvature of
    the equidistant through it (normalised by n - 1, with respect to
    -grad rho); ``regular`` masks points inside the chart's regular tube.
    """

    name: str
    metric: Callable[[np.ndarray], np.ndarray]
    rho: Callable[[np.ndarray], np.ndarray]
    H_d: Callable[[np.ndarray], np.ndarray]
    regular: Callable[[np.ndarray], np.ndarray]
    certificates: dict[str, Certificate]
    sample_box: tuple[tuple[float, float], ...]
    dimension: int = 3

    def christoffel(self, X):
        """Gamma^k_ij at points (..., 3) from central differences of the metric."""
        X = np.asarray(X, dtype=float)
        d = self.dimension
        eps = CHRISTOFFEL_STEP
        dg = np.empty(X.shape[:-1] + (d, d, d))  # dg[..., l, i, j] = d_l g_ij
        for l in range(d):
            e = np.zeros(d)
            e[l] = eps
            dg[..., l, :, :] = (self.metric(X + e) - self.metric(X - e)) / (2 * eps)
        ginv = np.linalg.inv(self.metric(X))
        # Gamma_lij = (d_i g_jl + d_j g_il - d_l g_ij) / 2, lowered index first
        low = 0.5 * (np.einsum("...ijl->...lij", dg) + np.einsum("...jil->...lij", dg) - dg)
        return np.einsum("...kl,...lij->...kij", ginv, low)

    def eikonal_error(self, n=1000, seed=0, step=1e-5) -> float:
        """max | |grad rho|^2 - 1 | over random points of the sample box."""
        rng = np.random.default_rng(seed)
        lo = np.array([b[0] for b in self.sample_box])
        hi = np.array([b[1] for b in self.sample_box])
        X = lo + (hi - lo) * rng.random((n, self.dimension))
        grad = np.empty_like(X)
        for l in range(self.dimension):
            e = np.zeros(self.dimension)
            e[l] = step
            grad[:, l] = (self.rho(X + e) - self.rho(X - e)) / (2 * step)
        ginv = np.linalg.inv(self.metric(X))
        norm2 = np.einsum("ni,nij,nj->n", grad, ginv, grad)
        return float(np.max(np.abs(norm2 - 1.0)))

    def metric_spd(self, n=1000, seed=0) -> bool:
        rng = np.random.default_rng(seed)
        lo = np.array([b[0] for b in self.sample_box])
        hi = np.array([b[1] for b in self.sample_box])
        X = lo + (hi - lo) * rng.random((n, self.dimension))
        G = self.metric(X)
        return bool(np.allclose(G, np.swapaxes(G, -1, -2)) and np.all(np.linalg.eigvalsh(G) > 0))


def _diag_metric(*entries):
    def metric(X):
        X = np.asarray(X, dtype=float)
        out = np.zeros(X.shape[:-1] + (3, 3))
        for i, fn in enumerate(entries):
            out[..., i, i] = fn(X)
        return out
    return metric


def euclidean_chart() -> AmbientChart:
    """R^3 with rho = z (distance to the plane z = 0); equidistants are flat."""
    one = lambda X: np.ones(X.shape[:-1])  # noqa: E731
    flat = ClosedFormWarping("linear", {"a": 1.0, "b": 0.0})
    cert = Certificate(CurvatureProfile.constant(0.0), flat,
                       "Hessian of rho vanishes; h = 1 has h'/h = 0")
    return AmbientChart(
        "euclidean", _diag_metric(one, one, one), lambda X: np.asarray(X)[..., 2],
        lambda r: np.zeros_like(np.asarray(r, dtype=float)),
        lambda X: np.ones(np.asarray(X).shape[:-1], dtype=bool),
        {"tube": cert, "reverse": cert}, ((-2, 2), (-2, 2), (-2, 2)))


def horocylinder_chart() -> AmbientChart:
    """Upper half plane times R, coordinates (x, y, t), metric (dx^2 + dy^2)/y^2 + dt^2.

    rho = -log y is the signed distance to the horocylinder y = 1, oriented
    so that the horocycles grow like e^rho. Its Hessian on the equidistants
    is diag(1, 0) (horocycle direction, line direction), so H_d = 1/2.
    """
    inv_y2 = lambda X: 1.0 / np.asarray(X)[..., 1] ** 2  # noqa: E731
    one = lambda X: np.ones(np.asarray(X).shape[:-1])  # noqa: E731
    tube = Certificate(
        CurvatureProfile.constant(1.0), ClosedFormWarping("exp", {"k": 1.0}),
        "radial curvatures lie in [-1, 0] >= -1 and diag(1, 0) <= 1 Id = (h'/h) Id for h = e^t")
    reverse = Certificate(
        CurvatureProfile.constant(0.0), ClosedFormWarping("linear", {"a": 1.0, "b": 0.0}),
        "radial curvatures <= 0 = -G and diag(1, 0) >= 0 Id = (h'/h) Id for h = 1; "
        "G = 1 fails here since the line direction has Hessian 0 < 1")
    return AmbientChart(
        "h2xr-horocylinder", _diag_metric(inv_y2, inv_y2, one),
        lambda X: -np.log(np.asarray(X)[..., 1]),
        lambda r: np.full_like(np.asarray(r, dtype=float), 0.5),
        lambda X: np.asarray(X)[..., 1] > 0,
        {"tube": tube, "reverse": reverse}, ((-2, 2), (0.2, 5), (-2, 2)))


def warped_chart(name="exp", **params) -> AmbientChart:
    """Coordinates (rho, x, y) with metric d rho^2 + h(rho)^2 (dx^2 + dy^2).

    The default h = e^rho is hyperbolic space in horospherical coordinates.
    The Hessian of rho on the equidistants is exactly (h'/h) Id, so both
    forms hold with G = h''/h and H_d = h'/h.
    """
    w = ClosedFormWarping(name, params)
    if w.profile.kind != "constant":
        raise ValueError("warped chart needs a constant-curvature warping (h''/h constant)")
    one = lambda X: np.ones(np.asarray(X).shape[:-1])  # noqa: E731
    h2 = lambda X: w.h(np.asarray(X)[..., 0]) ** 2  # noqa: E731
    cert = Certificate(w.profile, w, "Hessian of rho on equidistants equals (h'/h) Id")
    lo, hi = w.positivity_interval
    box_lo = max(lo + 0.2, -2.0) if math.isfinite(lo) else -2.0
    box_hi = min(hi - 0.2, 2.0) if math.isfinite(hi) else 2.0
    return AmbientChart(
        f"warped-{name}", _diag_metric(one, h2, h2), lambda X: np.asarray(X)[..., 0],
        lambda r: w.ratio(np.asarray(r, dtype=float)),
        lambda X: (np.asarray(X)[..., 0] > lo) & (np.asarray(X)[..., 0] < hi),
        {"tube": cert, "reverse": cert}, ((box_lo, box_hi), (-2, 2), (-2, 2)))


CHARTS = {
    "euclidean": euclidean_chart,
    "h2xr-horocylinder": horocylinder_chart,
    "warped": warped_chart,
}


def get_chart(name: str, **params) -> AmbientChart:
    try:
        return CHARTS[name](**params)
    except KeyError:
        raise ValueError(f"unknown chart {name!r}; choose from {', '.join(CHARTS)}") from None


@dataclass(eq=False)
class ImmersionPatch:
    """Parametrised surface (u, v) -> chart coordinates on a structured grid.

    ``u_range``/``v_range`` bound the interior grid of ``nu`` x ``nv``
    points; two ghost layers are added on every side so that all interior
    points get full central-difference stencils.
    """

    chart: AmbientChart
    parametrization: Callable[[np.ndarray, np.ndarray], np.ndarray]
    u_range: tuple[float, float]
    v_range: tuple[float, float]
    nu: int
    nv: int
    name: str = "patch"

    def __post_init__(self):
        if self.nu < 3 or self.nv < 3:
            raise ValueError("grid needs at least 3 x 3 interior points")
        self.du = (self.u_range[1] - self.u_range[0]) / (self.nu - 1)
        self.dv = (self.v_range[1] - self.v_range[0]) / (self.nv - 1)
        u = self.u_range[0] + self.du * np.arange(-GHOST, self.nu + GHOST)
        v = self.v_range[0] + self.dv * np.arange(-GHOST, self.nv + GHOST)
        self.U, self.V = np.meshgrid(u, v, indexing="ij")
        X = np.asarray(self.parametrization(self.U, self.V), dtype=float)
        self.X = np.moveaxis(X, 0, -1)  # (Nu, Nv, 3)
        if not np.all(self.chart.regular(self.X)):
            raise ValueError("patch leaves the chart's regular tube")
        self._geometry()

    @property
    def h_grid(self) -> float:
        return max(self.du, self.dv)

    @property
    def interior(self):
        return (slice(GHOST, -GHOST), slice(GHOST, -GHOST))

    def _geometry(self):
        X = self.X
        Xu = np.gradient(X, self.du, axis=0, edge_order=2)
        Xv = np.gradient(X, self.dv, axis=1, edge_order=2)
        Xuu = np.gradient(Xu, self.du, axis=0, edge_order=2)
        Xvv = np.gradient(Xv, self.dv, axis=1, edge_order=2)
        Xuv = np.gradient(Xu, self.dv, axis=1, edge_order=2)
        G = self.chart.metric(X)
        guu = np.einsum("...i,...ij,...j->...", Xu, G, Xu)
        guv = np.einsum("...i,...ij,...j->...", Xu, G, Xv)
        gvv = np.einsum("...i,...ij,...j->...", Xv, G, Xv)
        det = guu * gvv - guv * guv
        if np.any(det <= 0):
            raise ValueError("degenerate induced metric")
        self.sqrtg = np.sqrt(det)
        self.ginv_uu, self.ginv_uv, self.ginv_vv = gvv / det, -guv / det, guu / det

        # unit normal: raise the covector Xu x Xv with G^{-1}, normalise in G
        Ginv = np.linalg.inv(G)
        N = np.einsum("...ij,...j->...i", Ginv, np.cross(Xu, Xv))
        N /= np.sqrt(np.einsum("...i,...ij,...j->...", N, G, N))[..., None]
        self.normal = N

        Gam = self.chart.christoffel(X)

        def second(Xab, Xa, Xb):
            acc = Xab + np.einsum("...kij,...i,...j->...k", Gam, Xa, Xb)
            return np.einsum("...i,...ij,...j->...", N, G, acc)

        self.II_uu = second(Xuu, Xu, Xu)
        self.II_uv = second(Xuv, Xu, Xv)
        self.II_vv = second(Xvv, Xv, Xv)
        trace = (self.ginv_uu * self.II_uu + 2 * self.ginv_uv * self.II_uv
                 + self.ginv_vv * self.II_vv)
        self.mean_curvature_signed = 0.5 * trace
        self.mean_curvature = np.abs(self.mean_curvature_signed)
        self.rho = self.chart.rho(X)


def discrete_laplace_beltrami(patch: ImmersionPatch, f_values) -> np.ndarray:
    """Delta f = (1/sqrt g) d_a(sqrt g g^{ab} d_b f), NaN on the two ghost layers."""
    f = np.asarray(f_values, dtype=float)
    if f.shape != patch.sqrtg.shape:
        raise ValueError(f"f has shape {f.shape}, grid is {patch.sqrtg.shape}")
    return kernels.laplace_beltrami(f, patch.sqrtg, patch.ginv_uu, patch.ginv_uv,
                                    patch.ginv_vv, patch.du, patch.dv)


@dataclass
class VerificationReport:
    form: str
    chart: str
    patch: str
    lhs: np.ndarray = field(repr=False)
    rhs: np.ndarray = field(repr=False)
    margin_min: float = math.nan
    argmin: tuple[float, float] = (math.nan, math.nan)
    passed: bool = False
    tolerance: float = 0.0
    h_grid: float = 0.0
    grid: tuple[int, int] = (0, 0)
    max_abs_lhs: float = 0.0
    mean_curvature_scale: float = 1.0
    certificate: str = ""
    convergence: list[dict] = field(default_factory=list)

    @property
    def max_violation(self) -> float:
        return max(0.0, -self.margin_min)

    def to_dict(self):
        return {
            "form": self.form,
            "chart": self.chart,
            "patch": self.patch,
            "grid": list(self.grid),
            "h_grid": self.h_grid,
            "margin_min": self.margin_min,
            "argmin": list(self.argmin),
            "pass": self.passed,
            "tolerance": self.tolerance,
            "max_abs_lhs": self.max_abs_lhs,
            "mean_curvature_scale": self.mean_curvature_scale,
            "certificate": self.certificate,
            "convergence": self.convergence,
        }


def _verify(patch: ImmersionPatch, form: str, rho0=0.0, m=2, mean_curvature_scale=1.0,
            tol_factor=TOL_FACTOR) -> VerificationReport:
    if form not in FORMS:
        raise ValueError(f"form must be one of {FORMS}")
    chart = patch.chart
    cert = chart.certificates.get(form)
    if cert is None:
        raise ValueError(f"chart {chart.name!r} has no certificate for the {form} form")
    n = chart.dimension
    w = cert.warping
    rho = patch.rho
    lo, hi = w.positivity_interval
    if np.any(rho <= lo) or np.any(rho >= hi):
        raise ValueError("patch leaves the positivity interval of the comparison warping")
    g = build_barrier(w, rho0)
    f = g(rho)
    lap = discrete_laplace_beltrami(patch, f)
    h = w.h(rho)
    phi = w.ratio(rho)
    absH = mean_curvature_scale * patch.mean_curvature
    if form == "tube":
        Hd = chart.H_d(rho)
        rhs = (n - 1) * Hd - (n - 1) * phi - m * absH + m * phi
    else:
        rhs = m * (phi - absH)
    lhs = lap / h
    sl = patch.interior
    margin = (lhs - rhs)[sl]
    k = np.unravel_index(int(np.argmin(margin)), margin.shape)
    tol = tol_factor * patch.h_grid
    mmin = float(margin[k])
    return VerificationReport(
        form=form, chart=chart.name, patch=patch.name, lhs=lhs[sl], rhs=rhs[sl],
        margin_min=mmin,
        argmin=(float(patch.U[sl][k]), float(patch.V[sl][k])),
        passed=bool(mmin >= -tol), tolerance=tol, h_grid=patch.h_grid,
        grid=(patch.nu, patch.nv), max_abs_lhs=float(np.max(np.abs(lap[sl]))),
        mean_curvature_scale=mean_curvature_scale, certificate=cert.derivation)


def verify_tube_inequality(patch: ImmersionPatch, **kw) -> VerificationReport:
    """Delta f/h >= (n-1) H_d - (n-1) h'/h - m |H| + m h'/h at interior grid points."""
    return _verify(patch, "tube", **kw)


def verify_reverse_inequality(patch: ImmersionPatch, **kw) -> VerificationReport:
    """Delta f/h >= m (h'/h - |H|) at interior grid points."""
    return _verify(patch, "reverse", **kw)


# patches --------------------------------------------------------------------

def flat_patch(chart=None, n=64, half_width=1.0):
    chart = chart or euclidean_chart()
    return ImmersionPatch(chart, lambda u, v: np.array([u, v, np.zeros_like(u)]),
                          (-half_width, half_width), (-half_width, half_width), n, n, "flat")


def sphere_patch(chart=None, n=64, radius=1.0):
    """Round sphere piece away from the poles, parametrised by polar and azimuthal angle."""
    chart = chart or euclidean_chart()

    def phi(u, v):
        return radius * np.array([np.sin(u) * np.cos(v), np.sin(u) * np.sin(v), np.cos(u)])

    return ImmersionPatch(chart, phi, (0.6, 2.5), (0.0, 1.5), n, n, "sphere")


def equidistant_patch(chart=None, n=64, depth=0.5, half_width=1.0):
    """The level set rho = depth of a warped chart."""
    chart = chart or warped_chart()
    return ImmersionPatch(chart, lambda u, v: np.array([np.full_like(u, depth), u, v]),
                          (-half_width, half_width), (-half_width, half_width), n, n,
                          "equidistant")


def tilted_patch(chart=None, n=128, alpha=1.0, y_range=(0.5, 2.0), x_range=(-1.0, 1.0)):
    """t = alpha log y over a rectangle of the upper half plane."""
    chart = chart or horocylinder_chart()
    if y_range[0] - GHOST * (y_range[1] - y_range[0]) / (n - 1) <= 0:
        raise ValueError("y_range (with ghost layers) must stay in y > 0")
    return ImmersionPatch(chart, lambda u, v: np.array([u, v, alpha * np.log(v)]),
                          x_range, y_range, n, n, f"tilted(alpha={alpha:g})")


def bump_patch(chart=None, n=64, depth=0.5, amplitude=0.2, half_width=1.0):
    """rho = depth + amplitude sin(x) cos(y) in a warped chart."""
    chart = chart or warped_chart()

    def phi(u, v):
        return np.array([depth + amplitude * np.sin(u) * np.cos(v), u, v])

    return ImmersionPatch(chart, phi, (-half_width, half_width), (-half_width, half_width),
                          n, n, "bump")


PATCHES = {
    "flat": flat_patch,
    "sphere": sphere_patch,
    "equidistant": equidistant_patch,
    "tilted": tilted_patch,
    "bump": bump_patch,
}


def grid_study(make_patch: Callable[[int], ImmersionPatch], form: str, grids=(128, 256),
               **kw) -> VerificationReport:
    """Verify at each grid size; the finest report carries the whole sequence."""
    reports = [_verify(make_patch(n), form, **kw) for n in grids]
    final = reports[-1]
    final.convergence = [{"grid": r.grid[0], "h_grid": r.h_grid, "margin_min": r.margin_min,
                          "max_violation": r.max_violation} for r in reports]
    return final
