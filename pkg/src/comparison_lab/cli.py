"""Jacobi, Riccati and mean-curvature comparison experiments from the command line.

Usage: ``comparison-lab <subcommand> [options]``.
Exit codes: 0 success or PASS, 1 FAIL verdict, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import acceptance, cmc, estimates, inequality, riccati, stochastic
from .errors import PreconditionError
from .profiles import CurvatureProfile
from .svg import emit_svg
from .warping import solve_jacobi

SUBCOMMANDS = ("jacobi", "riccati", "bound", "criterion", "bm", "cmc", "verify", "suite")
OUTPUT_KEYS = ("out", "svg")
_NOT_PARAMS = {"subcommand", "seed", "json", "config", "save_config"}


class UsageError(Exception):
    """Bad input; reported with exit code 2."""


@dataclass
class RunConfig:
    subcommand: str
    params: dict = field(default_factory=dict)
    seed: int | None = None
    outputs: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise UsageError(f"config field 'subcommand': unknown value {self.subcommand!r}")
        for name in ("params", "outputs", "tolerances"):
            if not isinstance(getattr(self, name), dict):
                raise UsageError(f"config field '{name}': must be an object")
        if self.seed is not None and (isinstance(self.seed, bool)
                                      or not isinstance(self.seed, int)):
            raise UsageError("config field 'seed': must be an integer")

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> "RunConfig":
        params, outputs, tols = {}, {}, {}
        for key, val in vars(ns).items():
            if key in _NOT_PARAMS:
                continue
            if isinstance(val, tuple):
                val = list(val)
            if key in OUTPUT_KEYS:
                if val is not None:
                    outputs[key] = str(val)
            elif key.startswith("tol"):
                tols[key] = val
            else:
                params[key] = val
        return cls(ns.subcommand, params, getattr(ns, "seed", None), outputs, tols)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"config is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
        known = {"subcommand", "params", "seed", "outputs", "tolerances"}
        extra = sorted(set(data) - known)
        if extra:
            raise UsageError(f"config field '{extra[0]}': unknown field")
        if "subcommand" not in data:
            raise UsageError("config field 'subcommand': missing")
        return cls(**data)

    def get(self, key, default=None):
        for group in (self.params, self.tolerances, self.outputs):
            if key in group:
                return group[key]
        return default


# helpers ---------------------------------------------------------------------

def _emit(data, as_json, human):
    if as_json:
        print(json.dumps(acceptance._clean(data), sort_keys=True, indent=2))
    else:
        print(human)


def _parse_profile(text, field_name="profile") -> CurvatureProfile:
    """Profile from JSON text, a path to a JSON file, or a bare number (constant G)."""
    if isinstance(text, dict):
        data = text
    else:
        try:
            return CurvatureProfile.constant(float(text))
        except ValueError:
            pass
        p = Path(text)
        raw = p.read_text() if p.suffix == ".json" and p.exists() else text
        try:
            data = json.loads(raw)
        except json.JSONDecodeError:
            raise UsageError(f"field '{field_name}': not a number, JSON object or JSON file") \
                from None
    try:
        return CurvatureProfile.from_dict(data)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"field '{field_name}': {exc}") from None


def _seed(cfg: RunConfig) -> int:
    if cfg.seed is not None:
        return int(cfg.seed)
    try:
        return acceptance.default_seed()
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _fmt(x):
    if x is None:
        return "-"
    return f"{x:.12g}" if isinstance(x, float) else str(x)


# subcommands -----------------------------------------------------------------

def cmd_jacobi(cfg: RunConfig, as_json: bool) -> int:
    prof = _parse_profile(cfg.get("profile"))
    a, b = cfg.get("horizon")
    w = solve_jacobi(prof, cfg.get("t0"), cfg.get("h0"), cfg.get("dh0"), horizon=(a, b),
                     stop_at_zero=not cfg.get("through_zeros"))
    lo, hi = w.positivity_interval
    out = {"profile": prof.to_dict(), "t0": w.t0, "h0": w.h0, "dh0": w.dh0,
           "positivity_interval": [lo, hi], "focal_radius": hi if math.isfinite(hi) else None,
           "degenerate_zeros": w.degenerate_zeros, "truncated": w.truncated}
    interval = (max(lo, a), min(hi, w.knots[-1], b))
    if cfg.get("out"):
        w.to_csv(cfg.get("out"), n=cfg.get("samples"), interval=interval)
    if cfg.get("svg"):
        t, h, _, ratio = w.sample(cfg.get("samples"), interval=interval)
        emit_svg([("h", t, h)], "t", "h", cfg.get("svg"))
    human = "\n".join([f"profile             {json.dumps(prof.to_dict())}",
                       f"positivity interval ({_fmt(lo)}, {_fmt(hi)})",
                       f"focal radius        {_fmt(out['focal_radius'])}"])
    _emit(out, as_json, human)
    return 0


def cmd_riccati(cfg: RunConfig, as_json: bool) -> int:
    prof = _parse_profile(cfg.get("profile"))
    direction = cfg.get("direction")
    side = "upper" if direction == "lower" else "lower"
    rng = np.random.default_rng([_seed(cfg), 3])
    a, b = cfg.get("horizon")
    dim = cfg.get("dim")
    rows = []
    for i in range(cfg.get("draws")):
        path = riccati.random_curvature_path(rng, dim, prof, side)
        A0 = riccati.random_initial_shape(rng, dim, cfg.get("lam0"), direction)
        state = riccati.integrate_riccati(path, A0, (a, b))
        rep = riccati.verify_hessian_comparison(state, direction, tol=cfg.get("tol"))
        rows.append(rep)
    worst = min(rows, key=lambda r: r.margin_min)
    passed = all(r.passed for r in rows)
    if cfg.get("out"):
        with open(cfg.get("out"), "w") as fh:
            fh.write("draw,margin_min,t_argmin,pass,blowup_time\n")
            for i, r in enumerate(rows):
                bt = "" if r.blowup_time is None else repr(r.blowup_time)
                fh.write(f"{i},{r.margin_min!r},{r.t_argmin!r},{int(bool(r.passed))},{bt}\n")
    out = {"direction": direction, "draws": len(rows), "pass": passed,
           "worst": worst.to_dict()}
    human = (f"{len(rows)} draws, direction {direction}: worst margin "
             f"{worst.margin_min:.3e} at t = {worst.t_argmin:.6g} -> "
             f"{'PASS' if passed else 'FAIL'}")
    _emit(out, as_json, human)
    return 0 if passed else 1


def cmd_bound(cfg: RunConfig, as_json: bool) -> int:
    reports = []
    if not cfg.get("scenario"):
        raise UsageError("field 'scenario': required")
    for path in cfg.get("scenario"):
        try:
            s = estimates.Scenario.load(path)
        except OSError as exc:
            raise UsageError(f"field 'scenario': cannot read {path}: {exc.strerror}") from None
        reports.append(estimates.compute_bound(s))
    data = [r.to_dict() for r in reports]
    _emit(data if len(data) > 1 else data[0], as_json, estimates.render_table(reports))
    return 0


def cmd_criterion(cfg: RunConfig, as_json: bool) -> int:
    if cfg.get("model"):
        prof = stochastic.model_criterion_profile(cfg.get("model"))
    elif cfg.get("profile") is not None:
        prof = _parse_profile(cfg.get("profile"))
    else:
        raise UsageError("field 'profile': give --profile or --model")
    v = stochastic.check_criterion(prof, tail_horizon=cfg.get("tail_horizon"))
    out = {"profile": prof.to_dict(), **v.to_dict()}
    human = "\n".join([f"G(0) > 0             {v.g0_positive}",
                       f"G nondecreasing      {v.nondecreasing}",
                       f"int G^(-1/2)         {v.integral_divergent} ({v.method})",
                       f"Borbely-type flag    {v.borbely_flag}",
                       f"verdict              {v.overall}"])
    _emit(out, as_json, human)
    return 0


def cmd_bm(cfg: RunConfig, as_json: bool) -> int:
    w = stochastic.model_warping(cfg.get("model"))
    seed = _seed(cfg)
    stats = stochastic.simulate_radial_diffusion(
        w, cfg.get("n") - 1, cfg.get("r0"), cfg.get("T"), cfg.get("dt"), cfg.get("paths"),
        seed, explosion_radius=cfg.get("explosion_radius"), inner=cfg.get("inner"))
    if cfg.get("out"):
        stats.to_csv(cfg.get("out"))
    if cfg.get("svg"):
        times = np.linspace(0.0, cfg.get("T"), 201)
        curve = stochastic.survival_curve(stats, times)
        emit_svg([(cfg.get("model"), [c[0] for c in curve], [c[1] for c in curve])],
                 "t", "survival", cfg.get("svg"))
    out = {"model": cfg.get("model"), "n": cfg.get("n"), "r0": cfg.get("r0"),
           **stats.to_dict()}
    human = "\n".join([f"model                 {cfg.get('model')} (n = {cfg.get('n')})",
                       f"paths                 {stats.paths}",
                       f"exploded              {stats.exploded}",
                       f"survival probability  {stats.survival_probability:.6f} "
                       f"+/- {stats.standard_error:.2g}",
                       f"mean exit time        {_fmt(out['mean_exit_time_of_exploded'])}"])
    _emit(out, as_json, human)
    return 0


def cmd_cmc(cfg: RunConfig, as_json: bool) -> int:
    try:
        p = cmc.CmcParams(cfg.get("n"), cfg.get("H"))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if p.regime == "critical":
        curve = cmc.build_cmc_sphere(p, cfg.get("samples"))
    else:
        curve = cmc.integrate_profile(p, cfg.get("rmax"), cfg.get("samples"))
    check = cmc.verify_profile_mean_curvature(curve, tol=cfg.get("tol"))
    out_path = cfg.get("out") or f"cmc_n{p.n}_H{p.H:g}.csv"
    curve.to_csv(out_path)
    if cfg.get("svg"):
        series = [("u", curve.r, curve.u)]
        if curve.mirror_u is not None:
            series.append(("reflection", curve.r, curve.mirror_u))
        emit_svg(series, "r", "u", cfg.get("svg"))
    out = {**curve.summary(), "flux_deviation": curve.flux_deviation(),
           "mean_curvature_check": check.to_dict(), "csv": str(out_path)}
    lines = [f"n = {p.n}, H = {p.H:g}, regime {curve.regime}"]
    if curve.critical_radius is not None:
        lines.append(f"r0 = {curve.critical_radius!r}")
        lines.append(f"height = {curve.total_height!r}")
    lines.append(f"flux deviation {out['flux_deviation']:.3e}")
    lines.append(f"mean curvature check {check.max_deviation:.3e} -> "
                 f"{'PASS' if check.passed else 'FAIL'}")
    lines.append(f"profile written to {out_path}")
    _emit(out, as_json, "\n".join(lines))
    return 0 if check.passed else 1


def cmd_verify(cfg: RunConfig, as_json: bool) -> int:
    chart_name = cfg.get("chart")
    if chart_name not in inequality.CHARTS:
        raise UsageError(f"field 'chart': unknown value {chart_name!r}")
    patch_name = cfg.get("patch")
    if patch_name not in inequality.PATCHES:
        raise UsageError(f"field 'patch': unknown value {patch_name!r}")
    chart = inequality.get_chart(chart_name)
    make = inequality.PATCHES[patch_name]

    def build(n):
        kw = {"chart": chart, "n": n}
        if patch_name == "tilted":
            kw["alpha"] = cfg.get("alpha")
        if patch_name in ("equidistant", "bump"):
            kw["depth"] = cfg.get("depth")
        return make(**kw)

    forms = inequality.FORMS if cfg.get("form") == "both" else (cfg.get("form"),)
    grid = cfg.get("grid")
    grids = (grid, 2 * grid) if cfg.get("refine") else (grid,)
    reports = [inequality.grid_study(build, form, grids=grids,
                                     mean_curvature_scale=cfg.get("mean_curvature_scale"),
                                     tol_factor=cfg.get("tol_factor"))
               for form in forms]
    data = {r.form: r.to_dict() for r in reports}
    if cfg.get("out"):
        acceptance.write_json(cfg.get("out"), data)
    passed = all(r.passed for r in reports)
    lines = [f"{r.form:8s} margin_min {r.margin_min: .6e} at (u, v) = "
             f"({r.argmin[0]:.4g}, {r.argmin[1]:.4g}), tol {r.tolerance:.3g} -> "
             f"{'PASS' if r.passed else 'FAIL'}" for r in reports]
    _emit(data, as_json, "\n".join(lines))
    return 0 if passed else 1


def cmd_suite(cfg: RunConfig, as_json: bool) -> int:
    seed = _seed(cfg)
    out = Path(cfg.get("out") or "suite_out")
    out.mkdir(parents=True, exist_ok=True)
    echo = None if as_json else print
    results = acceptance.run_battery(seed, out, echo=echo)
    if not cfg.get("skip_determinism"):
        det = acceptance.criterion_8(seed, reference_dir=out)
        if echo:
            echo(det.line())
        results.append(det)
    passed = all(r.passed for r in results)
    if as_json:
        _emit({"seed": seed, "out": str(out), "pass": passed,
               "criteria": [{**r.to_dict(), "pass": r.passed} for r in results]}, True, "")
    else:
        print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed; "
              f"outputs in {out}")
    return 0 if passed else 1


HANDLERS = {"jacobi": cmd_jacobi, "riccati": cmd_riccati, "bound": cmd_bound,
            "criterion": cmd_criterion, "bm": cmd_bm, "cmc": cmd_cmc, "verify": cmd_verify,
            "suite": cmd_suite}


# parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--config", help="run from a saved RunConfig JSON file")
    common.add_argument("--save-config", help="write the effective RunConfig to this path")

    parser = argparse.ArgumentParser(
        prog="comparison-lab", description=__doc__.splitlines()[0],
        epilog="exit codes: 0 success or PASS, 1 FAIL verdict, 2 usage or input error")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("jacobi", parents=[common], help="solve h'' = G h")
    p.add_argument("--profile", default="-1",
                   help="number (constant G), JSON object or JSON file")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--h0", type=float, default=0.0)
    p.add_argument("--dh0", type=float, default=1.0)
    p.add_argument("--horizon", type=float, nargs=2, default=(0.0, 10.0))
    p.add_argument("--through-zeros", action="store_true",
                   help="continue past the first zero of h")
    p.add_argument("--samples", type=int, default=1001)
    p.add_argument("--out", help="CSV path (t,h,dh,ratio)")
    p.add_argument("--svg")

    p = sub.add_parser("riccati", parents=[common], help="random Hessian comparison runs")
    p.add_argument("--profile", default="1")
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--direction", choices=("lower", "upper"), default="lower")
    p.add_argument("--lam0", type=float, default=0.5)
    p.add_argument("--draws", type=int, default=20)
    p.add_argument("--horizon", type=float, nargs=2, default=(0.0, 3.0))
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out")

    p = sub.add_parser("bound", parents=[common], help="mean curvature lower bounds")
    p.add_argument("--scenario", action="append", help="scenario JSON file (repeatable)")

    p = sub.add_parser("criterion", parents=[common], help="stochastic completeness criterion")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--profile")
    g.add_argument("--model", choices=sorted(stochastic.REFERENCE_MODELS))
    p.add_argument("--tail-horizon", type=float, default=1e4)

    p = sub.add_parser("bm", parents=[common], help="radial Brownian motion explosion")
    p.add_argument("--model", choices=sorted(stochastic.REFERENCE_MODELS), default="sinh")
    p.add_argument("--n", type=int, default=2, help="model dimension")
    p.add_argument("--r0", type=float, default=1.0)
    p.add_argument("--T", type=float, default=5.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--paths", type=int, default=10_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--explosion-radius", type=float, default=1e3)
    p.add_argument("--inner", choices=("reflect", "absorb", "none"))
    p.add_argument("--out", help="CSV path (path_id,exploded,exit_time)")
    p.add_argument("--svg", help="survival curve")

    p = sub.add_parser("cmc", parents=[common], help="rotational CMC profiles")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--H", type=float, default=0.5)
    p.add_argument("--rmax", type=float, default=5.0)
    p.add_argument("--samples", type=int, default=2001)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--out", help="CSV path (r,u,du,flux)")
    p.add_argument("--svg")

    p = sub.add_parser("verify", parents=[common], help="Laplacian inequality on a patch")
    p.add_argument("--chart", default="h2xr-horocylinder")
    p.add_argument("--patch", default="tilted")
    p.add_argument("--form", choices=("tube", "reverse", "both"), default="both")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--depth", type=float, default=0.5)
    p.add_argument("--grid", type=int, default=128)
    p.add_argument("--refine", action="store_true", help="also run at twice the grid size")
    p.add_argument("--mean-curvature-scale", type=float, default=1.0)
    p.add_argument("--tol-factor", type=float, default=inequality.TOL_FACTOR)
    p.add_argument("--out", help="JSON report path")

    p = sub.add_parser("suite", parents=[common], help="run the acceptance battery")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory (default suite_out)")
    p.add_argument("--skip-determinism", action="store_true",
                   help="skip the second run that checks byte-identical outputs")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if ns.config:
            try:
                cfg = RunConfig.from_json(Path(ns.config).read_text())
            except OSError as exc:
                raise UsageError(f"field 'config': cannot read {ns.config}: {exc.strerror}") \
                    from None
        else:
            cfg = RunConfig.from_namespace(ns)
            if ns.save_config:
                Path(ns.save_config).write_text(cfg.to_json() + "\n")
        if ns.config and cfg.subcommand != ns.subcommand:
            raise UsageError(f"config field 'subcommand': {cfg.subcommand!r} does not match "
                             f"{ns.subcommand!r}")
        if ns.config:
            _fill_defaults(cfg, RunConfig.from_namespace(parser.parse_args([ns.subcommand])))
        return HANDLERS[cfg.subcommand](cfg, ns.json)
    except (UsageError, PreconditionError, ValueError) as exc:
        print(f"comparison-lab {ns.subcommand}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"comparison-lab {ns.subcommand}: error: {exc}", file=sys.stderr)
        return 2


def _fill_defaults(cfg: RunConfig, defaults: RunConfig):
    """Check a loaded config against the parser defaults and fill what it leaves out."""
    for group in ("params", "tolerances", "outputs"):
        given, base = getattr(cfg, group), getattr(defaults, group)
        allowed = set(base) | (set(OUTPUT_KEYS) if group == "outputs" else set())
        if group == "outputs":
            allowed &= {a.dest for a in _subparser(cfg.subcommand)._actions}
        for key, val in given.items():
            if key not in allowed:
                raise UsageError(f"config field '{group}.{key}': unknown for "
                                 f"{cfg.subcommand!r}")
            ref = base.get(key)
            if ref is None or val is None:
                continue
            ok = (isinstance(val, (int, float)) and not isinstance(val, bool)
                  if isinstance(ref, float) else isinstance(val, type(ref)))
            if not ok:
                raise UsageError(f"config field '{group}.{key}': expected "
                                 f"{type(ref).__name__}, got {type(val).__name__}")
        setattr(cfg, group, {**base, **given})


def _subparser(name):
    parser = build_parser()
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
