"""Pure-numpy versions of the hot kernels (same algorithms, vectorised)."""

import numpy as np

from .codes import (
    ABSORBED, COSH, DOMAIN_EXIT, EXP, EXP_POWER, EXPLODED, INNER_ABSORB,
    INNER_REFLECT, LINEAR, SIN, SINH,
)


def jacobi_eigvalsh(mats, tol=1e-15, max_sweeps=60):
    a = np.array(mats, dtype=float, copy=True)
    nb, n, _ = a.shape
    iu = np.triu_indices(n, 1)
    for _sweep in range(max_sweeps):
        off = np.sum(a[:, iu[0], iu[1]] ** 2, axis=1)
        total = np.sum(np.diagonal(a, axis1=1, axis2=2) ** 2, axis=1) + 2 * off
        if np.all((off <= tol * tol * total) | (off == 0.0)):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                nz = apq != 0.0
                if not nz.any():
                    continue
                safe = np.where(nz, apq, 1.0)
                theta = (a[:, q, q] - a[:, p, p]) / (2.0 * safe)
                sgn = np.where(theta >= 0.0, 1.0, -1.0)
                t = np.where(nz, sgn / (np.abs(theta) + np.hypot(theta, 1.0)), 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, :, p].copy()
                aq = a[:, :, q].copy()
                a[:, :, p] = c[:, None] * ap - s[:, None] * aq
                a[:, :, q] = s[:, None] * ap + c[:, None] * aq
                ap = a[:, p, :].copy()
                aq = a[:, q, :].copy()
                a[:, p, :] = c[:, None] * ap - s[:, None] * aq
                a[:, q, :] = s[:, None] * ap + c[:, None] * aq
    d = np.sort(np.diagonal(a, axis1=1, axis2=2), axis=1)
    return d[:, ::-1].copy()


def _ratio(r, code, p0, p1, knots, hcoef, dhcoef):
    if code == SINH:
        return p0 / np.tanh(p0 * r)
    if code == EXP:
        return np.full_like(r, p0)
    if code == COSH:
        return p0 * np.tanh(p0 * r)
    if code == SIN:
        return p0 / np.tan(p0 * r)
    if code == LINEAR:
        return p1 / (p0 + p1 * r)
    if code == EXP_POWER:
        return p0 * p1 * r ** (p1 - 1.0)
    m = knots.shape[0] - 1
    i = np.clip(np.searchsorted(knots, r, side="right") - 1, 0, m - 1)
    s = (r - knots[i]) / (knots[i + 1] - knots[i])
    hc = hcoef[i]
    dc = dhcoef[i]
    h = hc[:, 5]
    dh = dc[:, 5]
    for k in range(4, -1, -1):
        h = h * s + hc[:, k]
        dh = dh * s + dc[:, k]
    return dh / h


def radial_em(z, r0, dt, coef, code, p0, p1, knots, hcoef, dhcoef,
              inner_mode, inner, lo, hi, radius):
    npaths, nsteps = z.shape
    status = np.zeros(npaths, dtype=np.int8)
    exit_step = np.full(npaths, -1, dtype=np.int64)
    r = np.full(npaths, float(r0))
    alive = np.arange(npaths)
    sq = np.sqrt(dt)
    with np.errstate(all="ignore"):
        for k in range(nsteps):
            if alive.size == 0:
                break
            ra = r[alive]
            drift = coef * _ratio(ra, code, p0, p1, knots, hcoef, dhcoef)
            ra = ra + drift * dt + sq * z[alive, k]
            r[alive] = ra
            dead = np.zeros(alive.size, dtype=bool)

            bad = ra != ra
            status[alive[bad]] = DOMAIN_EXIT
            dead |= bad

            boom = ~dead & (np.abs(ra) >= radius)
            status[alive[boom]] = EXPLODED
            dead |= boom

            if inner_mode != 0:
                hit = ~dead & (ra <= inner)
                if inner_mode == INNER_REFLECT:
                    ra = np.where(hit, 2.0 * inner - ra, ra)
                    r[alive] = ra
                elif inner_mode == INNER_ABSORB:
                    status[alive[hit]] = ABSORBED
                    dead |= hit

            out = ~dead & ((ra <= lo) | (ra >= hi))
            status[alive[out]] = DOMAIN_EXIT
            dead |= out

            exit_step[alive[dead]] = k
            alive = alive[~dead]
    return status, exit_step, r


def laplace_beltrami(f, sqrtg, ginv_uu, ginv_uv, ginv_vv, du, dv):
    nu, nv = f.shape
    fu = np.full((nu, nv), np.nan)
    fv = np.full((nu, nv), np.nan)
    fu[1:-1, 1:-1] = (f[2:, 1:-1] - f[:-2, 1:-1]) / (2.0 * du)
    fv[1:-1, 1:-1] = (f[1:-1, 2:] - f[1:-1, :-2]) / (2.0 * dv)
    wu = sqrtg * (ginv_uu * fu + ginv_uv * fv)
    wv = sqrtg * (ginv_uv * fu + ginv_vv * fv)
    out = np.full((nu, nv), np.nan)
    div = (wu[3:-1, 2:-2] - wu[1:-3, 2:-2]) / (2.0 * du) + \
          (wv[2:-2, 3:-1] - wv[2:-2, 1:-3]) / (2.0 * dv)
    out[2:-2, 2:-2] = div / sqrtg[2:-2, 2:-2]
    return out
