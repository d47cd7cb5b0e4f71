"""Adaptive Dormand-Prince 5(4) stepping with hooks for per-step projection.

The driver is a generator so callers can build their own dense output
(quintic Hermite for the Jacobi equation, cubic Hermite for Riccati) and
stop early when a zero or a blow-up is detected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

# Dormand-Prince tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_E = _B5 - _B4
_A_MAT = np.zeros((7, 7))
for _i, _row in enumerate(_A):
    _A_MAT[_i, : len(_row)] = _row

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0


class IntegrationError(RuntimeError):
    """Step size underflow; ``t_last`` is the last accepted time."""

    def __init__(self, message: str, t_last: float):
        super().__init__(f"{message} (last valid t = {t_last!r})")
        self.t_last = t_last


@dataclass
class Step:
    t0: float
    t1: float
    y0: np.ndarray
    y1: np.ndarray
    f0: np.ndarray
    f1: np.ndarray


def dopri_step(fun, t, y, f0, h):
    """One Dormand-Prince step on a 1-d state. Returns (y_new, f_new, error_vector)."""
    k = np.empty((7,) + np.shape(y))
    k[0] = f0
    for i in range(1, 7):
        k[i] = fun(t + _C[i] * h, y + h * _A_MAT[i, :i] @ k[:i])
    # the last stage is evaluated at the 5th-order solution (FSAL)
    y_new = y + h * _B5 @ k
    err = h * _E @ k
    return y_new, k[6], err


def _initial_step(fun, t0, y0, f0, direction, rtol, atol):
    scale = atol + np.abs(y0) * rtol
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + h0 * direction * f0
    f1 = fun(t0 + h0 * direction, y1)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1)


def integrate(
    fun: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    y0,
    t_end: float,
    *,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    max_step: float = math.inf,
    max_steps: int = 200_000,
    project: Callable[[np.ndarray], np.ndarray] | None = None,
    project_derivative: Callable[[np.ndarray], np.ndarray] | None = None,
) -> Iterator[Step]:
    """Yield accepted steps from ``t0`` towards ``t_end``.

    ``project`` is applied to the state after every accepted step (e.g.
    renormalisation or symmetrisation); the yielded ``y1``/``f1`` are the raw
    values before projection, so a step's endpoints share one scaling.
    If ``project_derivative`` is given it maps the raw derivative to the
    projected state's derivative; otherwise ``fun`` is re-evaluated.
    Stops silently after ``max_steps`` accepted steps.
    """
    y = np.asarray(y0, dtype=float).copy()
    if t_end == t0:
        return
    direction = 1.0 if t_end > t0 else -1.0
    t = float(t0)
    f = fun(t, y)
    h = min(_initial_step(fun, t, y, f, direction, rtol, atol), max_step)
    for _ in range(max_steps):
        remaining = abs(t_end - t)
        if remaining <= 1e-15 * max(1.0, abs(t_end)):
            return
        h = min(h, max_step, remaining)
        while True:
            min_h = 16 * np.spacing(max(abs(t), 1.0))
            if h < min_h:
                raise IntegrationError("step size underflow", t)
            t_new = t + direction * h
            if abs(t_end - t_new) <= 1e-15 * max(1.0, abs(t_end)):
                t_new = t_end
            y_new, f_new, err = dopri_step(fun, t, y, f, t_new - t)
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            e = err / scale
            err_norm = math.sqrt(float(e @ e) / e.size)
            if not np.isfinite(err_norm):
                h *= MIN_FACTOR
                continue
            if err_norm <= 1.0:
                factor = MAX_FACTOR if err_norm == 0 else min(
                    MAX_FACTOR, SAFETY * err_norm ** -0.2
                )
                break
            h *= max(MIN_FACTOR, SAFETY * err_norm ** -0.2)
        yield Step(t, t_new, y, y_new, f, f_new)
        if project is not None:
            y = project(y_new)
            f = fun(t_new, y) if project_derivative is None else project_derivative(f_new)
        else:
            y, f = y_new, f_new
        t = t_new
        h *= factor


def cubic_hermite(t, ta, tb, ya, yb, fa, fb):
    """Cubic Hermite interpolant on [ta, tb]; arrays broadcast over trailing axes."""
    dt = tb - ta
    s = (t - ta) / dt
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return h00 * ya + h10 * dt * fa + h01 * yb + h11 * dt * fb


def quintic_coefficients(ya, da, dda, yb, db, ddb, delta):
    """Power-basis coefficients of the quintic Hermite interpolant in s in [0, 1].

    Inputs are value, first and second derivative (w.r.t. t) at both ends;
    ``delta`` is the interval length. Returns an array (..., 6).
    """
    d0 = delta * da
    d1 = delta * db
    e0 = delta * delta * dda
    e1 = delta * delta * ddb
    dy = yb - ya
    c0 = ya
    c1 = d0
    c2 = 0.5 * e0
    c3 = 10 * dy - 6 * d0 - 4 * d1 - 0.5 * (3 * e0 - e1)
    c4 = -15 * dy + 8 * d0 + 7 * d1 + 0.5 * (3 * e0 - 2 * e1)
    c5 = 6 * dy - 3 * (d0 + d1) - 0.5 * (e0 - e1)
    return np.stack([c0, c1, c2, c3, c4, c5], axis=-1)


def polyval_rows(coef, s):
    """Evaluate rows of power-basis coefficients (lowest first) at s."""
    out = coef[..., 5]
    for k in range(4, -1, -1):
        out = out * s + coef[..., k]
    return out


def polyder_rows(coef, s, order=1):
    c = coef
    for _ in range(order):
        k = np.arange(1, c.shape[-1])
        c = c[..., 1:] * k
    out = c[..., -1]
    for k in range(c.shape[-1] - 2, -1, -1):
        out = out * s + c[..., k]
    return out


def polyint_rows(coef, s):
    """Integral from 0 to s of the row polynomials."""
    k = np.arange(1, coef.shape[-1] + 1)
    c = coef / k
    out = c[..., -1]
    for j in range(c.shape[-1] - 2, -1, -1):
        out = out * s + c[..., j]
    return out * s
