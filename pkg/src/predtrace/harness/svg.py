"""Minimal SVG writers: learning curves and square heatmaps.

Output is plain text with fixed-precision coordinates so identical input
produces identical bytes.
"""
from __future__ import annotations

import math
from collections import defaultdict
from xml.sax.saxutils import escape

import numpy as np

W, H = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 64, 170, 24, 48
PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _f(x: float) -> str:
    return f"{x:.2f}"


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


def curve_series(rows, metric: str):
    """Group rows by label → sorted ``(episode, mean, lo, hi)`` arrays.

    Rows are sorted before aggregation so the input order never matters.
    Diverged (NaN) rows are skipped.
    """
    rows = sorted(rows)
    varying = [name for name in ("alpha_v", "alpha_m", "gamma", "lambda_", "eta")
               if len({getattr(r, name) for r in rows}) > 1]
    groups: dict = defaultdict(lambda: defaultdict(list))
    for r in rows:
        val = r.rmse if metric == "rmse" else r.ret
        if math.isnan(val):
            continue
        label = r.algo + "".join(
            f" {name.rstrip('_')}={getattr(r, name):g}" for name in varying)
        groups[label][r.episode].append(val)
    out = {}
    for label in sorted(groups):
        eps = sorted(groups[label])
        vals = [groups[label][e] for e in eps]
        out[label] = (np.array(eps, dtype=float),
                      np.array([math.fsum(v) / len(v) for v in vals]),
                      np.array([min(v) for v in vals]),
                      np.array([max(v) for v in vals]))
    return out


def learning_curves_svg(rows, metric: str = "rmse", title: str = "") -> str:
    series = curve_series(rows, metric)
    if not series:
        raise ValueError("nothing to plot")
    xs = np.concatenate([s[0] for s in series.values()])
    ys = np.concatenate([np.concatenate([s[2], s[3]]) for s in series.values()])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = min(0.0, float(ys.min())), float(ys.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def px(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def py(y):
        return TOP + ph - (y - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
           f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">',
           f'<rect width="{W}" height="{H}" fill="white"/>']
    if title:
        out.append(f'<text x="{LEFT}" y="16">{escape(title)}</text>')
    out.append(f'<line x1="{LEFT}" y1="{_f(TOP + ph)}" x2="{_f(LEFT + pw)}" '
               f'y2="{_f(TOP + ph)}" stroke="black"/>')
    out.append(f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{_f(TOP + ph)}" stroke="black"/>')
    for t in _ticks(x0, x1):
        out.append(f'<text x="{_f(px(t))}" y="{_f(TOP + ph + 16)}" '
                   f'text-anchor="middle">{t:g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<text x="{LEFT - 6}" y="{_f(py(t) + 4)}" text-anchor="end">{t:.3g}</text>')
    out.append(f'<text x="{_f(LEFT + pw / 2)}" y="{H - 8}" text-anchor="middle">episode</text>')
    out.append(f'<text x="14" y="{_f(TOP + ph / 2)}" text-anchor="middle" '
               f'transform="rotate(-90 14 {_f(TOP + ph / 2)})">{escape(metric)}</text>')
    for k, (label, (ex, mean, lo, hi)) in enumerate(series.items()):
        color = PALETTE[k % len(PALETTE)]
        if np.any(hi > lo):
            band = [f"{_f(px(x))},{_f(py(y))}" for x, y in zip(ex, hi)]
            band += [f"{_f(px(x))},{_f(py(y))}" for x, y in zip(ex[::-1], lo[::-1])]
            out.append(f'<polygon points="{" ".join(band)}" fill="{color}" '
                       f'fill-opacity="0.15" stroke="none"/>')
        pts = " ".join(f"{_f(px(x))},{_f(py(y))}" for x, y in zip(ex, mean))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = TOP + 14 + 16 * k
        out.append(f'<line x1="{W - RIGHT + 12}" y1="{ly - 4}" x2="{W - RIGHT + 32}" '
                   f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{W - RIGHT + 36}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def heatmap_svg(grid: np.ndarray, cell: int = 48) -> str:
    """Cells shaded by ``|value| / max|value|``; negatives in red, positives in blue."""
    rows, cols = grid.shape
    scale = float(np.max(np.abs(grid))) if grid.size else 0.0
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{cols * cell}" '
           f'height="{rows * cell}" viewBox="0 0 {cols * cell} {rows * cell}">']
    for r in range(rows):
        for c in range(cols):
            val = float(grid[r, c])
            level = abs(val) / scale if scale > 0 else 0.0
            shade = int(round(255 * (1.0 - level)))
            fill = (f"rgb({shade},{shade},255)" if val >= 0 else f"rgb(255,{shade},{shade})")
            out.append(f'<rect x="{c * cell}" y="{r * cell}" width="{cell}" height="{cell}" '
                       f'fill="{fill}" stroke="#cccccc"><title>{val!r}</title></rect>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
