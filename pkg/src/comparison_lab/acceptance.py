"""Acceptance battery: eight numbered checks shared by the CLI ``suite`` and the tests.

Every check returns a :class:`CriterionResult`. Its ``metrics`` are pure
functions of the seed, so files written from them are byte-stable across
runs; wall-clock time is kept apart in ``runtime`` and only printed.
"""

from __future__ import annotations

import filecmp
import json
import math
import os
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import cmc, inequality, stochastic
from .estimates import Scenario, compute_bound
from .profiles import CurvatureProfile
from .riccati import CurvatureOperatorPath, integrate_riccati, random_curvature_path, \
    random_initial_shape, verify_hessian_comparison
from .svg import emit_svg
from .warping import solve_jacobi, sturm_compare

DEFAULT_SEED = 42
SEED_ENV = "COMPARISON_LAB_SEED"


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"environment variable {SEED_ENV} must be an integer, got {raw!r}") \
            from None


@dataclass
class CriterionResult:
    number: int
    name: str
    checks: dict[str, bool]
    metrics: dict
    budget: float
    runtime: float = 0.0
    files: list[str] = field(default_factory=list)

    @property
    def checks_passed(self) -> bool:
        return all(self.checks.values())

    @property
    def passed(self) -> bool:
        return self.checks_passed and self.runtime <= self.budget

    def line(self) -> str:
        failed = [k for k, ok in self.checks.items() if not ok]
        extra = f" failed: {', '.join(failed)}" if failed else ""
        if self.runtime > self.budget:
            extra += f" over budget ({self.budget:g} s)"
        return (f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number} {self.name} "
                f"({self.runtime:.2f} s){extra}")

    def to_dict(self):
        # runtime left out on purpose: the written record must be reproducible
        return {"criterion": self.number, "name": self.name, "checks": self.checks,
                "checks_passed": self.checks_passed, "budget_seconds": self.budget,
                "metrics": self.metrics}


def _clean(obj):
    """JSON-ready copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    return obj


def write_json(path, data):
    with open(path, "w") as fh:
        json.dump(_clean(data), fh, sort_keys=True, indent=2)
        fh.write("\n")


def _timed(fn):
    def wrapper(seed=None, out_dir=None):
        seed = default_seed() if seed is None else int(seed)
        out = Path(out_dir) if out_dir is not None else None
        if out is not None:
            out.mkdir(parents=True, exist_ok=True)
        start = time.perf_counter()
        result = fn(seed, out)
        result.runtime = time.perf_counter() - start
        if out is not None:
            name = f"criterion_{result.number}.json"
            write_json(out / name, result.to_dict())
            result.files.append(name)
        return result
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# 1 ---------------------------------------------------------------------------

@_timed
def criterion_1(seed, out):
    """Closed-form Jacobi solutions on [0, 5] and the focal radius of sin."""
    t = np.linspace(0.0, 5.0, 2001)
    cases = {
        "sin": (-1.0, 0.0, 1.0, np.sin),
        "sinh": (1.0, 0.0, 1.0, np.sinh),
        "exp": (1.0, 1.0, 1.0, np.exp),
        "linear": (0.0, 1.0, 1.0, lambda s: 1.0 + s),
    }
    errors, focal = {}, None
    for name, (k, h0, dh0, exact) in cases.items():
        w = solve_jacobi(CurvatureProfile.constant(k), 0.0, h0, dh0, horizon=(0.0, 5.0),
                         stop_at_zero=False)
        ref = exact(t)
        # relative error for the growing solutions, absolute for sin and the line
        scale = np.maximum(1.0, np.abs(ref))
        errors[name] = float(np.max(np.abs(w.h(t) - ref) / scale))
        if name == "sin":
            focal = w.positivity_interval[1]
            if out is not None:
                w.to_csv(out / "jacobi_sin.csv", n=501, interval=(0.0, 0.999 * math.pi))
    focal_err = abs(focal - math.pi)
    checks = {f"{k}_error": v <= 1e-8 for k, v in errors.items()}
    checks["focal_radius"] = focal_err <= 1e-8
    res = CriterionResult(1, "jacobi closed forms", checks,
                          {"max_error": errors, "focal_radius": focal,
                           "focal_radius_error": focal_err}, budget=1.0)
    if out is not None:
        res.files.append("jacobi_sin.csv")
    return res


# 2 ---------------------------------------------------------------------------

def random_ordered_pair(rng, degree=3):
    """Polynomial profiles G1 <= G2 on t >= 0 (G2 - G1 has nonnegative coefficients)."""
    c1 = rng.uniform(-1.0, 1.0, degree + 1)
    c1[1:] *= 0.5 ** np.arange(1, degree + 1)
    c2 = c1 + rng.uniform(0.0, 1.0, degree + 1) * 0.5 ** np.arange(degree + 1)
    return CurvatureProfile.polynomial(c1), CurvatureProfile.polynomial(c2)


@_timed
def criterion_2(seed, out):
    """Sturm ordering of h'/h for 50 seeded ordered polynomial profile pairs."""
    rng = np.random.default_rng([seed, 2])
    rows, worst = [], 0.0
    hypotheses = True
    for i in range(50):
        g1, g2 = random_ordered_pair(rng)
        dh0 = float(rng.uniform(-0.5, 1.0))
        w1 = solve_jacobi(g1, 0.0, 1.0, dh0, horizon=(0.0, 3.0))
        w2 = solve_jacobi(g2, 0.0, 1.0, dh0, horizon=(0.0, 3.0))
        rep = sturm_compare(w1, w2)
        hypotheses &= bool(rep.hypotheses_met)
        viol = rep.max_violation if rep.hypotheses_met else math.nan
        worst = max(worst, viol) if math.isfinite(viol) else worst
        rows.append((i, rep.margin_min, viol))
    if out is not None:
        with open(out / "sturm.csv", "w") as fh:
            fh.write("pair,margin_min,violation\n")
            for i, m, v in rows:
                fh.write(f"{i},{m!r},{v!r}\n")
    res = CriterionResult(2, "sturm ordering",
                          {"hypotheses_met": hypotheses, "violation": worst <= 1e-7},
                          {"pairs": 50, "max_violation": worst}, budget=10.0)
    if out is not None:
        res.files.append("sturm.csv")
    return res


# 3 ---------------------------------------------------------------------------

def _random_profile(rng):
    if rng.random() < 0.5:
        return CurvatureProfile.constant(float(rng.uniform(-1.0, 1.0)))
    return CurvatureProfile.polynomial([float(rng.uniform(-1.0, 1.0)), 0.0,
                                        float(rng.uniform(0.0, 0.5))])


def _scalar_case(k, dim=3, T=5.0):
    """A' = -A^2 + k Id, A(0) = 0, solved by sqrt(k) tanh(sqrt(k) t) Id."""
    path = CurvatureOperatorPath.scalar_multiple(CurvatureProfile.constant(k), dim)
    state = integrate_riccati(path, np.zeros((dim, dim)), (0.0, T))
    ts = state.sample_times(4)
    root = math.sqrt(k)
    exact = root * np.tanh(root * ts)
    ev = state.eigenvalues(ts)
    return float(np.max(np.abs(ev - exact[:, None])))


@_timed
def criterion_3(seed, out):
    """Hessian comparison along 100 seeded curvature paths per direction."""
    rng = np.random.default_rng([seed, 3])
    rows, worst = [], {"lower": math.inf, "upper": math.inf}
    hypotheses = True
    blowups = 0
    for direction, side in (("lower", "upper"), ("upper", "lower")):
        for i in range(100):
            dim = 2 + i % 5
            prof = _random_profile(rng)
            path = random_curvature_path(rng, dim, prof, side)
            lam0 = float(rng.uniform(-1.0, 1.0))
            A0 = random_initial_shape(rng, dim, lam0, direction)
            state = integrate_riccati(path, A0, (0.0, 3.0))
            rep = verify_hessian_comparison(state, direction)
            hypotheses &= bool(rep.hypotheses_met)
            worst[direction] = min(worst[direction], rep.margin_min)
            blowups += state.blowup_time is not None
            rows.append((direction, i, dim, rep.margin_min, rep.blowup_time))
    closed = {"tanh": _scalar_case(1.0), "sqrt(1+p) tanh, p=0.5": _scalar_case(1.5)}
    if out is not None:
        with open(out / "riccati.csv", "w") as fh:
            fh.write("direction,draw,dim,margin_min,blowup_time\n")
            for d, i, dim, m, b in rows:
                fh.write(f"{d},{i},{dim},{m!r},{'' if b is None else repr(b)}\n")
    checks = {"hypotheses_met": hypotheses,
              "lower_margin": worst["lower"] >= -1e-6,
              "upper_margin": worst["upper"] >= -1e-6}
    checks.update({f"closed_form {k}": v <= 1e-7 for k, v in closed.items()})
    res = CriterionResult(3, "riccati comparison", checks,
                          {"worst_margin": worst, "draws_per_direction": 100,
                           "blowups": blowups, "closed_form_error": closed}, budget=30.0)
    if out is not None:
        res.files.append("riccati.csv")
    return res


# 4 ---------------------------------------------------------------------------

BOUND_CASES = [
    # (label, scenario, expected exact value as string or float, strict)
    ("horocylinder (2,1)",
     {"theorem": "horocylinder", "m": 2, "ambient": {"type": "hyperbolic_product", "n": 2,
                                                      "ell": 1}}, "1/2", False),
    ("horocylinder (5,2)",
     {"theorem": "horocylinder", "m": 5, "ambient": {"type": "hyperbolic_product", "n": 3,
                                                      "ell": 2}}, "3/5", False),
    ("horocylinder (7,3)",
     {"theorem": "horocylinder", "m": 7, "ambient": {"type": "hyperbolic_product", "n": 4,
                                                      "ell": 3}}, "4/7", False),
    ("wedge c=3/2 (3,1)",
     {"theorem": "wedge", "m": 3, "ambient": {"type": "wedge", "c": 1.5, "ell": 1}},
     "1", False),
    ("wedge c=2/5 (4,1)",
     {"theorem": "wedge", "m": 4, "ambient": {"type": "wedge", "c": 0.4, "ell": 1}},
     "3/10", False),
    ("submersion kappa=1/4",
     {"theorem": "submersion", "m": 3,
      "ambient": {"type": "submersion", "profile": {"kind": "constant", "k": 1.0},
                  "kappa": 0.25}, "tube_depth": 2.0}, "11/12", False),
    ("submersion over hyperbolic",
     {"theorem": "submersion_over_hyperbolic", "m": 4,
      "ambient": {"type": "submersion", "ell": 1, "kappa": 0.2,
                  "base_curvature_at_least_minus_one": True}}, "4/5", False),
    ("mean convex side d0=2",
     {"theorem": "mean_convex_side", "m": 3, "sphere_radius": 2.0},
     2.0 / 3.0 / math.tanh(2.0), True),
]


@_timed
def criterion_4(seed, out):
    """Bound calculators against their closed-form constants."""
    from fractions import Fraction
    results, checks = {}, {}
    for label, data, expected, strict in BOUND_CASES:
        rep = compute_bound(Scenario.from_dict(json.loads(json.dumps(data))))
        if isinstance(expected, str):
            ok = rep.exact is not None and rep.exact == Fraction(expected)
        else:
            ok = abs(rep.bound - expected) <= 1e-12 * max(1.0, abs(expected))
        ok = ok and rep.strict == strict
        checks[label] = bool(ok)
        results[label] = rep.to_dict()
    if out is not None:
        write_json(out / "bounds.json", results)
    res = CriterionResult(4, "bound constants", checks, {"reports": results}, budget=10.0)
    if out is not None:
        res.files.append("bounds.json")
    return res


# 5 ---------------------------------------------------------------------------

CMC_CASES = [(2, 0.5, 5.0), (2, 1.0, 5.0), (3, 2.0 / 3.0, 4.0), (3, 1.0, 5.0), (4, 0.5, 3.0),
             (4, 1.0, 5.0)]


@_timed
def criterion_5(seed, out):
    """Rotational constant mean curvature profiles."""
    curves = {}
    for n, H, r_max in CMC_CASES:
        p = cmc.CmcParams(n, H)
        curve = cmc.build_cmc_sphere(p) if p.regime == "critical" else \
            cmc.integrate_profile(p, r_max)
        curves[f"n={n},H={H:.6g}"] = curve
    half = curves["n=2,H=0.5"]
    exact = 2.0 * (np.cosh(half.r / 2.0) - 1.0)
    closed_err = float(np.max(np.abs(half.u - exact)))
    r0 = curves["n=2,H=1"].critical_radius
    r0_err = abs(r0 - math.log(3.0))
    flux_dev = {k: c.flux_deviation() for k, c in curves.items()}
    mc = {k: cmc.verify_profile_mean_curvature(c).max_deviation for k, c in curves.items()}
    if out is not None:
        half.to_csv(out / "cmc_n2_H0.5.csv")
        curves["n=2,H=1"].to_csv(out / "cmc_n2_H1.csv")
    checks = {"closed_form": closed_err <= 1e-6, "critical_radius": r0_err <= 1e-8,
              "flux": max(flux_dev.values()) <= 1e-6,
              "mean_curvature": max(mc.values()) < 1e-4}
    res = CriterionResult(5, "cmc profiles", checks,
                          {"closed_form_error": closed_err, "critical_radius": r0,
                           "critical_radius_error": r0_err, "flux_deviation": flux_dev,
                           "mean_curvature_deviation": mc,
                           "summaries": {k: c.summary() for k, c in curves.items()}},
                          budget=5.0)
    if out is not None:
        res.files += ["cmc_n2_H0.5.csv", "cmc_n2_H1.csv"]
    return res


# 6 ---------------------------------------------------------------------------

BM_SETTINGS = {"fiber_dim": 1, "r0": 1.0, "T": 5.0, "dt": 1e-3, "paths": 10_000}


@_timed
def criterion_6(seed, out):
    """Radial diffusion: sinh model survives, exp(r^4) model explodes."""
    stats, verdicts = {}, {}
    for name in ("sinh", "exp4"):
        stats[name] = stochastic.simulate_radial_diffusion(
            stochastic.model_warping(name), seed=seed, **BM_SETTINGS)
        verdicts[name] = stochastic.check_criterion(stochastic.model_criterion_profile(name))
    if out is not None:
        times = np.linspace(0.0, BM_SETTINGS["T"], 101)
        series = []
        for name, st in stats.items():
            st.to_csv(out / f"bm_{name}.csv")
            curve = stochastic.survival_curve(st, times)
            series.append((name, [c[0] for c in curve], [c[1] for c in curve]))
        emit_svg(series, "t", "survival", out / "survival.svg")
    checks = {
        "sinh_survival": stats["sinh"].survival_probability >= 0.99,
        "exp4_explosion": stats["exp4"].explosion_fraction >= 0.9,
        "sinh_verdict": verdicts["sinh"].overall == stochastic.COMPLETE,
        "exp4_verdict": verdicts["exp4"].overall == stochastic.INCOMPLETE_SUSPECTED,
    }
    res = CriterionResult(6, "stochastic separation", checks,
                          {"settings": {**BM_SETTINGS, "seed": seed},
                           "stats": {k: v.to_dict() for k, v in stats.items()},
                           "verdicts": {k: v.to_dict() for k, v in verdicts.items()}},
                          budget=120.0)
    if out is not None:
        res.files += ["bm_sinh.csv", "bm_exp4.csv", "survival.svg"]
    return res


# 7 ---------------------------------------------------------------------------

@_timed
def criterion_7(seed, out):
    """Laplacian inequalities on grid patches: equality case, tilted patch, negative control."""
    equality = {}
    for n in (32, 64):
        patch = inequality.equidistant_patch(n=n)
        for form in inequality.FORMS:
            rep = inequality._verify(patch, form)
            equality[f"{form}@{n}"] = {"max_abs_lap": rep.max_abs_lhs,
                                       "limit": 10 * patch.h_grid ** 2,
                                       "margin_min": rep.margin_min}
    alpha = 1.0
    exact_lap = 1.0 / (1.0 + alpha * alpha)
    tilted = inequality.grid_study(lambda n: inequality.tilted_patch(n=n, alpha=alpha),
                                   "reverse", grids=(128, 256))
    lap_err = []
    for n in (128, 256):
        rep = inequality.verify_reverse_inequality(inequality.tilted_patch(n=n, alpha=alpha))
        lap_err.append(float(np.max(np.abs(rep.lhs - exact_lap))))
    conv = tilted.convergence
    negative = {}
    for name, make in (("equidistant", inequality.equidistant_patch),
                       ("bump", inequality.bump_patch)):
        rep = inequality.verify_tube_inequality(make(n=64), mean_curvature_scale=0.5)
        negative[name] = {"margin_min": rep.margin_min, "pass": rep.passed}
    if out is not None:
        write_json(out / "verify_tilted.json", tilted.to_dict())
    checks = {
        "equality_case": all(v["max_abs_lap"] <= v["limit"] for v in equality.values()),
        "tilted_margin_128": conv[0]["margin_min"] >= -1e-2,
        "tilted_improves_256": (conv[1]["max_violation"] <= conv[0]["max_violation"]
                                and lap_err[1] < lap_err[0]),
        "negative_control_fails": not any(v["pass"] for v in negative.values()),
    }
    res = CriterionResult(7, "laplacian inequalities", checks,
                          {"equality": equality, "tilted_convergence": conv,
                           "tilted_laplacian_error": lap_err, "negative_control": negative},
                          budget=60.0)
    if out is not None:
        res.files.append("verify_tilted.json")
    return res


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7}


def run_battery(seed=None, out_dir=None, numbers=None, echo=None):
    """Run criteria 1-7 and write ``acceptance.json`` plus per-criterion files."""
    seed = default_seed() if seed is None else int(seed)
    results = []
    for k in numbers or sorted(CRITERIA):
        res = CRITERIA[k](seed, out_dir)
        if echo is not None:
            echo(res.line())
        results.append(res)
    if out_dir is not None:
        write_json(Path(out_dir) / "acceptance.json",
                   {"seed": seed, "criteria": [r.to_dict() for r in results]})
    return results


def compare_dirs(a, b) -> list[str]:
    """Files that differ (or exist on one side only) between two output directories."""
    names_a = sorted(p.name for p in Path(a).iterdir())
    names_b = sorted(p.name for p in Path(b).iterdir())
    diff = sorted(set(names_a) ^ set(names_b))
    common = sorted(set(names_a) & set(names_b))
    _, mismatch, errors = filecmp.cmpfiles(a, b, common, shallow=False)
    return diff + mismatch + errors


def criterion_8(seed=None, reference_dir=None, runner=None):
    """Two runs with the same seed give byte-identical output files.

    ``runner(seed, out_dir)`` produces one run (default: :func:`run_battery`).
    With ``reference_dir`` only one more run is made and compared against it.
    """
    seed = default_seed() if seed is None else int(seed)
    runner = runner or (lambda s, d: run_battery(s, d))
    start = time.perf_counter()
    with tempfile.TemporaryDirectory() as tmp:
        dirs = []
        if reference_dir is None:
            first = Path(tmp) / "first"
            first.mkdir()
            runner(seed, first)
            dirs.append(first)
        else:
            dirs.append(Path(reference_dir))
        second = Path(tmp) / "second"
        second.mkdir()
        runner(seed, second)
        dirs.append(second)
        differing = compare_dirs(*dirs)
        files = len(list(dirs[1].iterdir()))
    res = CriterionResult(8, "determinism", {"identical_outputs": not differing and files > 0},
                          {"files_compared": files, "differing": differing},
                          budget=math.inf)
    res.runtime = time.perf_counter() - start
    return res
