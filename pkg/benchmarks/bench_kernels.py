"""Time the numba kernels against their numpy fallbacks and check they agree.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``. The first numba
call of each kernel is timed separately (compilation or cache load).
"""

import argparse
import time

import numpy as np

from comparison_lab import inequality, kernels, stochastic


def _best(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def bench_eigvalsh(mod, repeat):
    rng = np.random.default_rng(0)
    b = rng.standard_normal((20_000, 5, 5))
    mats = b + np.transpose(b, (0, 2, 1))
    return _best(lambda: mod.jacobi_eigvalsh(mats), repeat)


def bench_laplace(mod, repeat):
    patch = inequality.tilted_patch(n=512)
    f = np.log(patch.X[..., 1]) ** 2
    args = (f, patch.sqrtg, patch.ginv_uu, patch.ginv_uv, patch.ginv_vv, patch.du, patch.dv)
    return _best(lambda: mod.laplace_beltrami(*args), repeat)


def bench_radial(name, repeat):
    w = stochastic.model_warping("sinh")
    run = lambda: stochastic.simulate_radial_diffusion(  # noqa: E731
        w, 1, 1.0, 2.0, 1e-3, 2000, 42, backend=name).exit_times
    return _best(run, repeat)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"active backend: {kernels.BACKEND}")
    numba_mod = kernels.backend("numba")
    numpy_mod = kernels.backend("numpy")
    rows = []
    for label, fn in (("jacobi_eigvalsh 20000x5x5", bench_eigvalsh),
                      ("laplace_beltrami 516x516", bench_laplace)):
        first, _ = fn(numba_mod, 1)
        t_nb, r_nb = fn(numba_mod, args.repeat)
        t_np, r_np = fn(numpy_mod, args.repeat)
        diff = float(np.nanmax(np.abs(r_nb - r_np)))
        rows.append((label, first, t_nb, t_np, diff))
    first, _ = bench_radial("numba", 1)
    t_nb, r_nb = bench_radial("numba", args.repeat)
    t_np, r_np = bench_radial("numpy", args.repeat)
    both = np.isfinite(r_nb) & np.isfinite(r_np)
    same_status = bool(np.array_equal(np.isfinite(r_nb), np.isfinite(r_np)))
    diff = float(np.max(np.abs(r_nb[both] - r_np[both]))) if both.any() else 0.0
    rows.append(("radial_em 2000 paths x 2000 steps", first, t_nb, t_np,
                 diff if same_status else np.inf))

    print(f"{'kernel':36s} {'numba 1st':>10s} {'numba':>10s} {'numpy':>10s} "
          f"{'speedup':>8s} {'max diff':>10s}")
    for label, first, t_nb, t_np, diff in rows:
        print(f"{label:36s} {first:10.4f} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:8.1f} "
              f"{diff:10.2e}")


if __name__ == "__main__":
    main()
