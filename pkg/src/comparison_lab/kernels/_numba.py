import math

import numpy as np
from numba import njit

from .codes import (
    ABSORBED, COSH, DOMAIN_EXIT, EXP, EXP_POWER, EXPLODED, INNER_ABSORB,
    INNER_REFLECT, LINEAR, SIN, SINH, TABLE,
)


@njit(cache=True, nogil=True, error_model="numpy")
def jacobi_eigvalsh(mats, tol=1e-15, max_sweeps=60):
    nb, n, _ = mats.shape
    out = np.empty((nb, n))
    for b in range(nb):
        a = mats[b].copy()
        for _sweep in range(max_sweeps):
            off = 0.0
            total = 0.0
            for p in range(n):
                total += a[p, p] * a[p, p]
                for q in range(p + 1, n):
                    off += a[p, q] * a[p, q]
            total += 2.0 * off
            if off <= tol * tol * total or off == 0.0:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if apq == 0.0:
                        continue
                    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                    sgn = 1.0 if theta >= 0.0 else -1.0
                    t = sgn / (abs(theta) + math.hypot(theta, 1.0))
                    c = 1.0 / math.sqrt(t * t + 1.0)
                    s = t * c
                    for k in range(n):
                        akp = a[k, p]
                        akq = a[k, q]
                        a[k, p] = c * akp - s * akq
                        a[k, q] = s * akp + c * akq
                    for k in range(n):
                        apk = a[p, k]
                        aqk = a[q, k]
                        a[p, k] = c * apk - s * aqk
                        a[q, k] = s * apk + c * aqk
        d = np.empty(n)
        for i in range(n):
            d[i] = a[i, i]
        d.sort()
        for i in range(n):
            out[b, i] = d[n - 1 - i]
    return out


@njit(cache=True, nogil=True, error_model="numpy")
def _ratio(r, code, p0, p1, knots, hcoef, dhcoef):
    if code == SINH:
        return p0 / math.tanh(p0 * r)
    if code == EXP:
        return p0
    if code == COSH:
        return p0 * math.tanh(p0 * r)
    if code == SIN:
        return p0 / math.tan(p0 * r)
    if code == LINEAR:
        return p1 / (p0 + p1 * r)
    if code == EXP_POWER:
        return p0 * p1 * r ** (p1 - 1.0)
    # TABLE
    m = knots.shape[0] - 1
    i = np.searchsorted(knots, r, side="right") - 1
    if i < 0:
        i = 0
    elif i > m - 1:
        i = m - 1
    s = (r - knots[i]) / (knots[i + 1] - knots[i])
    h = hcoef[i, 5]
    dh = dhcoef[i, 5]
    for k in range(4, -1, -1):
        h = h * s + hcoef[i, k]
        dh = dh * s + dhcoef[i, k]
    return dh / h


@njit(cache=True, nogil=True, error_model="numpy")
def radial_em(z, r0, dt, coef, code, p0, p1, knots, hcoef, dhcoef,
              inner_mode, inner, lo, hi, radius):
    npaths, nsteps = z.shape
    status = np.zeros(npaths, dtype=np.int8)
    exit_step = np.full(npaths, -1, dtype=np.int64)
    r_final = np.empty(npaths)
    sq = math.sqrt(dt)
    for i in range(npaths):
        r = r0
        for k in range(nsteps):
            drift = coef * _ratio(r, code, p0, p1, knots, hcoef, dhcoef)
            r = r + drift * dt + sq * z[i, k]
            if r != r:
                status[i] = DOMAIN_EXIT
                exit_step[i] = k
                break
            if abs(r) >= radius:
                status[i] = EXPLODED
                exit_step[i] = k
                break
            if inner_mode != 0 and r <= inner:
                if inner_mode == INNER_REFLECT:
                    r = 2.0 * inner - r
                elif inner_mode == INNER_ABSORB:
                    status[i] = ABSORBED
                    exit_step[i] = k
                    break
            if r <= lo or r >= hi:
                status[i] = DOMAIN_EXIT
                exit_step[i] = k
                break
        r_final[i] = r
    return status, exit_step, r_final


@njit(cache=True, nogil=True, error_model="numpy")
def laplace_beltrami(f, sqrtg, ginv_uu, ginv_uv, ginv_vv, du, dv):
    nu, nv = f.shape
    wu = np.full((nu, nv), np.nan)
    wv = np.full((nu, nv), np.nan)
    for i in range(1, nu - 1):
        for j in range(1, nv - 1):
            fu = (f[i + 1, j] - f[i - 1, j]) / (2.0 * du)
            fv = (f[i, j + 1] - f[i, j - 1]) / (2.0 * dv)
            wu[i, j] = sqrtg[i, j] * (ginv_uu[i, j] * fu + ginv_uv[i, j] * fv)
            wv[i, j] = sqrtg[i, j] * (ginv_uv[i, j] * fu + ginv_vv[i, j] * fv)
    out = np.full((nu, nv), np.nan)
    for i in range(2, nu - 2):
        for j in range(2, nv - 2):
            div = (wu[i + 1, j] - wu[i - 1, j]) / (2.0 * du) + \
                  (wv[i, j + 1] - wv[i, j - 1]) / (2.0 * dv)
            out[i, j] = div / sqrtg[i, j]
    return out
