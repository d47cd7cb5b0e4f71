"""Minimal SVG line charts: polylines, axes and ticks on a fixed 800x500 canvas."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 800, 500
MARGIN = (70, 30, 30, 60)  # left, right, top, bottom
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _nice_ticks(lo, hi, target=6):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    x = first
    while x <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(x) < 1e-12 * step else x)
        x += step
    return ticks


def _fmt(x):
    return f"{x:.4g}"


def emit_svg(series, xlabel="x", ylabel="y", path=None, title=None) -> str:
    """Write a standalone SVG line chart and return its text.

    ``series`` is a list of ``(label, x, y)`` triples or ``(x, y)`` pairs.
    Non-finite points are dropped. Raises ValueError on an empty series list
    or a series without finite points.
    """
    if not series:
        raise ValueError("emit_svg needs at least one series")
    clean = []
    for k, s in enumerate(series):
        label, x, y = s if len(s) == 3 else (f"series {k}", *s)
        x = np.asarray(x, dtype=float).ravel()
        y = np.asarray(y, dtype=float).ravel()
        if x.shape != y.shape:
            raise ValueError(f"series {label!r}: x and y differ in length")
        ok = np.isfinite(x) & np.isfinite(y)
        if not np.any(ok):
            raise ValueError(f"series {label!r} has no finite points")
        clean.append((str(label), x[ok], y[ok]))

    xs = np.concatenate([c[1] for c in clean])
    ys = np.concatenate([c[2] for c in clean])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    left, right, top, bottom = MARGIN
    pw, ph = WIDTH - left - right, HEIGHT - top - bottom

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + (y1 - y) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}">',
           f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<g stroke="black" stroke-width="1">'
           f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}"/>'
           f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}"/></g>']
    ticks = ['<g font-family="sans-serif" font-size="12">']
    for t in _nice_ticks(x0, x1):
        X = px(t)
        ticks.append(f'<line x1="{X:.2f}" y1="{top + ph}" x2="{X:.2f}" y2="{top + ph + 5}" '
                     f'stroke="black"/><text x="{X:.2f}" y="{top + ph + 19}" '
                     f'text-anchor="middle">{_fmt(t)}</text>')
    for t in _nice_ticks(y0, y1):
        Y = py(t)
        ticks.append(f'<line x1="{left - 5}" y1="{Y:.2f}" x2="{left}" y2="{Y:.2f}" '
                     f'stroke="black"/><text x="{left - 8}" y="{Y + 4:.2f}" '
                     f'text-anchor="end">{_fmt(t)}</text>')
    ticks.append(f'<text x="{left + pw / 2}" y="{HEIGHT - 15}" text-anchor="middle">'
                 f'{escape(xlabel)}</text>')
    ticks.append(f'<text x="18" y="{top + ph / 2}" text-anchor="middle" '
                 f'transform="rotate(-90 18 {top + ph / 2})">{escape(ylabel)}</text>')
    if title:
        ticks.append(f'<text x="{left + pw / 2}" y="{top - 10}" text-anchor="middle">'
                     f'{escape(title)}</text>')
    ticks.append("</g>")
    out.extend(ticks)
    for k, (label, x, y) in enumerate(clean):
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        color = COLORS[k % len(COLORS)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                   f'points="{pts}"><title>{escape(label)}</title></polyline>')
        out.append(f'<text x="{left + pw - 5}" y="{top + 16 + 16 * k}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="12" fill="{color}">'
                   f'{escape(label)}</text>')
    out.append("</svg>")
    text = "\n".join(out) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
