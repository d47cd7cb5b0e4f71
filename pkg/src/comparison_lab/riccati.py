"""Matrix Riccati equation A' = -A^2 - R along a geodesic and the Hessian comparison.

``bound_side`` on a curvature path says which one-sided sectional
curvature bound it satisfies: ``"upper"`` means K <= -G (every eigenvalue of
R(t) is at most -G(t)), ``"lower"`` means K >= -G. An upper curvature bound
gives the *lower* Hessian comparison A >= (h'/h) Id and vice versa.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from ._ode import cubic_hermite, integrate, polyval_rows, quintic_coefficients
from .profiles import CurvatureProfile
from .reports import ComparisonReport
from .warping import solve_jacobi

BLOWUP_LEVEL = 1e6
# h'/h loses absolute accuracy as h -> 0; comparisons stop beyond this level
COMPARE_LEVEL = 1e4
SYMMETRY_TOL = 1e-12

_CONCLUSION = {"upper": "lower", "lower": "upper"}


@dataclass(eq=False)
class CurvatureOperatorPath:
    """t -> R(t), the curvature endomorphism v -> R(v, grad rho) grad rho on the normal space."""

    dimension: int
    R: Callable[[float], np.ndarray]
    bound_profile: CurvatureProfile
    bound_side: str
    description: str = ""

    def __post_init__(self):
        if self.bound_side not in ("upper", "lower"):
            raise ValueError("bound_side must be 'upper' (K <= -G) or 'lower' (K >= -G)")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")

    @classmethod
    def constant(cls, matrix, bound_profile=None, bound_side="upper"):
        m = np.atleast_2d(np.asarray(matrix, dtype=float))
        if bound_profile is None:
            # tightest constant G for the requested side
            ev = np.linalg.eigvalsh(m)
            bound_profile = CurvatureProfile.constant(-ev[-1] if bound_side == "upper" else -ev[0])
        return cls(m.shape[0], lambda t: m, bound_profile, bound_side, "constant")

    @classmethod
    def scalar_multiple(cls, profile: CurvatureProfile, dimension: int, shift=0.0,
                        bound_side="upper"):
        """R(t) = (-G(t) + shift) Id."""
        eye = np.eye(dimension)
        return cls(dimension, lambda t: (-profile(t) + shift) * eye, profile, bound_side,
                   f"(-G + {shift}) Id")

    def max_asymmetry(self, ts) -> float:
        return max(float(np.max(np.abs(self.R(t) - self.R(t).T))) for t in ts)

    def check_bound(self, ts, tol=1e-9):
        """Worst signed excess of the curvature bound on ``ts`` (<= tol means satisfied)."""
        mats = np.array([self.R(t) for t in ts])
        ev = kernels.jacobi_eigvalsh(0.5 * (mats + np.transpose(mats, (0, 2, 1))))
        g = np.asarray(self.bound_profile(np.asarray(ts, dtype=float)), dtype=float)
        if self.bound_side == "upper":
            excess = ev[:, 0] + g          # lambda_max(R) <= -G
        else:
            excess = -g - ev[:, -1]        # lambda_min(R) >= -G
        k = int(np.argmax(excess))
        return float(excess[k]), float(ts[k])


def random_curvature_path(rng: np.random.Generator, dimension: int, profile: CurvatureProfile,
                          bound_side: str, terms=2, amplitude=1.0) -> CurvatureOperatorPath:
    """R(t) = -G(t) Id -/+ sum_k a_k(t) Q_k D_k Q_k^T with a_k >= 0, D_k >= 0.

    ``bound_side="upper"`` subtracts the PSD part (K <= -G), ``"lower"`` adds it.
    """
    d = dimension
    qs, ds, omegas, phases = [], [], [], []
    for _ in range(terms):
        q, r = np.linalg.qr(rng.standard_normal((d, d)))
        qs.append(q * np.sign(np.diag(r)))
        ds.append(amplitude * rng.uniform(0.0, 1.0, d))
        omegas.append(rng.uniform(0.2, 3.0))
        phases.append(rng.uniform(0.0, 2 * math.pi))
    mats = np.array([q @ np.diag(dk) @ q.T for q, dk in zip(qs, ds)])
    mats = 0.5 * (mats + np.transpose(mats, (0, 2, 1)))
    omegas, phases = np.array(omegas), np.array(phases)
    sign = -1.0 if bound_side == "upper" else 1.0
    eye = np.eye(d)

    terms_ = list(zip(mats, omegas.tolist(), phases.tolist()))

    def R(t):
        out = -profile(t) * eye
        for m, w, ph in terms_:
            out += (0.5 * sign * (1.0 + math.sin(w * t + ph))) * m
        return out

    return CurvatureOperatorPath(d, R, profile, bound_side, f"random ({terms} terms)")


def random_initial_shape(rng: np.random.Generator, dimension: int, lam0: float,
                         direction: str, amplitude=0.5) -> np.ndarray:
    """lam0 Id +/- S with S PSD, ordered for the requested comparison direction."""
    b = rng.standard_normal((dimension, dimension))
    s = amplitude * (b @ b.T) / dimension
    sign = 1.0 if direction == "lower" else -1.0
    a0 = lam0 * np.eye(dimension) + sign * s
    return 0.5 * (a0 + a0.T)


@dataclass(eq=False)
class RiccatiState:
    """Dense solution of A' = -A^2 - R on [t[0], t[-1]].

    Quintic Hermite per step when second derivatives are stored, cubic otherwise.
    """

    path: CurvatureOperatorPath
    comparison: object
    t: np.ndarray
    A_knots: np.ndarray
    dA_knots: np.ndarray
    blowup_time: float | None = None
    max_asymmetry: float = 0.0
    notes: list[str] = field(default_factory=list)
    ddA_knots: np.ndarray | None = field(default=None, repr=False)

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    def A(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        i = np.clip(np.searchsorted(self.t, t, side="right") - 1, 0, len(self.t) - 2)
        ta, tb = self.t[i], self.t[i + 1]
        s = lambda x: x[:, None, None]  # noqa: E731
        if self.ddA_knots is not None:
            coef = quintic_coefficients(self.A_knots[i], self.dA_knots[i], self.ddA_knots[i],
                                        self.A_knots[i + 1], self.dA_knots[i + 1],
                                        self.ddA_knots[i + 1], s(tb - ta))
            return polyval_rows(coef, s((t - ta) / (tb - ta)))
        out = cubic_hermite(s(t), s(ta), s(tb), self.A_knots[i], self.A_knots[i + 1],
                            self.dA_knots[i], self.dA_knots[i + 1])
        return out

    def eigenvalues(self, t):
        """Descending eigenvalues of A at the given times, shape (len(t), dim)."""
        mats = self.A(t)
        return kernels.jacobi_eigvalsh(0.5 * (mats + np.transpose(mats, (0, 2, 1))))

    def sample_times(self, per_step=3):
        """Knots plus interior points of each step."""
        frac = np.arange(per_step) / per_step
        inner = (self.t[:-1, None] + np.diff(self.t)[:, None] * frac[None, :]).ravel()
        return np.concatenate([inner, self.t[-1:]])


def _check_symmetric(a0, tol=SYMMETRY_TOL):
    if a0.ndim != 2 or a0.shape[0] != a0.shape[1]:
        raise ValueError(f"A0 must be square, got shape {a0.shape}")
    if np.max(np.abs(a0 - a0.T)) > tol * max(1.0, np.max(np.abs(a0))):
        raise ValueError("A0 is not symmetric")


def integrate_riccati(path: CurvatureOperatorPath, A0, horizon, *, comparison=None,
                      rtol=1e-10, atol=1e-12, max_steps=100_000) -> RiccatiState:
    """Integrate A' = -A^2 - R(t) from A(horizon[0]) = A0 forward to horizon[1].

    Integration halts once an eigenvalue exceeds 1e6 in absolute value; the
    blow-up time is then extrapolated from a ~ -1/(t* - t) as t - 1/lambda
    and the offending step is dropped, so the dense solution ends at the last
    bounded sample.

    ``comparison`` defaults to the solution of h'' = G h (G the path's bound
    profile) with h(t0) = 1 and h'(t0) equal to the extreme eigenvalue of A0
    on the side required by the comparison direction.
    """
    A0 = np.atleast_2d(np.asarray(A0, dtype=float))
    _check_symmetric(A0)
    d = path.dimension
    if A0.shape != (d, d):
        raise ValueError(f"A0 has shape {A0.shape}, path dimension is {d}")
    t0, t1 = map(float, horizon)
    if not t1 > t0:
        raise ValueError("horizon must be increasing")

    if comparison is None:
        ev = np.linalg.eigvalsh(A0)
        lam0 = ev[0] if _CONCLUSION[path.bound_side] == "lower" else ev[-1]
        comparison = solve_jacobi(path.bound_profile, t0, 1.0, float(lam0), horizon=(t0, t1))

    def rhs(t, y):
        a = y.reshape(d, d)
        return (-(a @ a) - path.R(t)).ravel()

    def symmetrize(y):
        a = y.reshape(d, d)
        return (0.5 * (a + a.T)).ravel()

    ts = [t0]
    As = [A0.copy()]
    dAs = [rhs(t0, A0.ravel()).reshape(d, d)]
    blowup = None
    asym = 0.0
    for step in integrate(rhs, t0, A0.ravel(), t1, rtol=rtol, atol=atol,
                          max_steps=max_steps, project=symmetrize,
                          project_derivative=symmetrize):
        a1 = step.y1.reshape(d, d)
        asym = max(asym, float(np.max(np.abs(a1 - a1.T))))
        a1 = 0.5 * (a1 + a1.T)
        if np.abs(a1).sum(axis=1).max() > BLOWUP_LEVEL:
            ev = np.linalg.eigvalsh(a1)
            big = ev[0] if abs(ev[0]) >= abs(ev[-1]) else ev[-1]
            if abs(big) > BLOWUP_LEVEL:
                blowup = step.t1 - 1.0 / big
                break
        ts.append(step.t1)
        As.append(a1)
        dAs.append(rhs(step.t1, a1.ravel()).reshape(d, d))

    notes = []
    if blowup is None and ts[-1] < t1:
        notes.append(f"integration stopped at t = {ts[-1]:.6g} (step limit)")
    if len(ts) < 2:
        raise ValueError("no bounded step before blow-up; shorten the horizon or refine tolerances")
    ts, As, dAs = np.array(ts), np.array(As), np.array(dAs)
    # A'' = -(A'A + AA') - R'(t), with R' by differences kept inside [t0, t_end]
    eps = 1e-5 * np.maximum(1.0, np.abs(ts))
    left = np.maximum(ts - eps, ts[0])
    right = np.minimum(ts + eps, ts[-1])
    dR = np.array([(path.R(b) - path.R(a)) / (b - a) for a, b in zip(left, right)])
    ddAs = -(dAs @ As + As @ dAs) - 0.5 * (dR + np.transpose(dR, (0, 2, 1)))
    return RiccatiState(path, comparison, ts, As, dAs, blowup, asym, notes, ddAs)


def verify_hessian_comparison(state: RiccatiState, direction: str, *, tol=1e-6,
                              n_check=256, hypothesis_tol=1e-9, per_step=3) -> ComparisonReport:
    """Check A >= (h'/h) Id ("lower") or A <= (h'/h) Id ("upper") along the solution.

    The hypotheses (curvature bound on the matching side, ordering of A0
    against h'(t0)/h(t0)) are checked on a grid of ``n_check`` points; if
    they fail the report carries ``passed=None``. The margin is
    lambda_min(A) - h'/h ("lower") or h'/h - lambda_max(A) ("upper"),
    sampled at the step knots and ``per_step - 1`` interior points per step,
    up to the last bounded sample before any blow-up and strictly inside the
    comparison's positivity interval and where |h'/h| <= 1e4. The margin
    is divided by max(1, |h'/h|), so it is the plain eigenvalue gap whenever
    |h'/h| <= 1 and a relative gap beyond.
    """
    if direction not in ("upper", "lower"):
        raise ValueError("direction must be 'upper' or 'lower'")
    path, w = state.path, state.comparison
    notes = list(state.notes)
    t0, t_end = float(state.t[0]), state.t_end

    met = True
    needed_side = "upper" if direction == "lower" else "lower"
    if path.bound_side != needed_side:
        met = False
        notes.append(f"direction {direction!r} needs a curvature path with bound_side "
                     f"{needed_side!r}")
    grid = np.linspace(t0, t_end, n_check)
    excess, t_bad = path.check_bound(grid, hypothesis_tol)
    if excess > hypothesis_tol:
        met = False
        notes.append(f"curvature bound violated by {excess:.3g} at t = {t_bad:.6g}")
    if abs(w.t0 - t0) > 1e-12 or w.profile != path.bound_profile:
        met = False
        notes.append("comparison warping does not match the path's bound profile and start")
    ev0 = np.linalg.eigvalsh(state.A_knots[0])
    phi0 = float(w.ratio(t0))
    if direction == "lower" and ev0[0] < phi0 - hypothesis_tol:
        met = False
        notes.append(f"A0 not >= (h'/h)(t0) Id: lambda_min = {ev0[0]:.6g} < {phi0:.6g}")
    if direction == "upper" and ev0[-1] > phi0 + hypothesis_tol:
        met = False
        notes.append(f"A0 not <= (h'/h)(t0) Id: lambda_max = {ev0[-1]:.6g} > {phi0:.6g}")
    if state.max_asymmetry > 1e-9:
        notes.append(f"symmetry drift {state.max_asymmetry:.3g} before projection")

    ts = state.sample_times(per_step)
    lo, hi = w.positivity_interval
    ts = ts[(ts > lo) & (ts < hi) & (ts <= w.solved_interval[1])]
    if not met:
        return ComparisonReport(math.nan, math.nan, None, hypotheses_met=False, tolerance=tol,
                                blowup_time=state.blowup_time, notes=notes)
    phi = np.asarray(w.ratio(ts), dtype=float)
    keep = np.abs(phi) <= COMPARE_LEVEL
    if not np.all(keep):
        notes.append(f"samples with |h'/h| > {COMPARE_LEVEL:g} skipped (near a zero of h)")
    ts, phi = ts[keep], phi[keep]
    ev = state.eigenvalues(ts)
    if direction == "lower":
        margin = ev[:, -1] - phi
    else:
        margin = phi - ev[:, 0]
    margin = margin / np.maximum(1.0, np.abs(phi))
    k = int(np.argmin(margin))
    m = float(margin[k])
    return ComparisonReport(m, float(ts[k]), bool(m >= -tol), hypotheses_met=True,
                            tolerance=tol, blowup_time=state.blowup_time, notes=notes)
