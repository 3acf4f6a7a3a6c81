"""Minimal SVG line charts; enough to eyeball a CSV without a plotting stack."""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"]

W, H = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 150, 30, 55


def _ticks(lo, hi, log):
    if log:
        return [10.0**e for e in range(math.floor(lo), math.ceil(hi) + 1)]
    span = hi - lo
    if span <= 0:
        return [lo]
    step = 10 ** math.floor(math.log10(span / 5))
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= 6:
            step *= mult
            break
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-12 * span:
        out.append(round(v, 12))
        v += step
    return out


def line_chart(
    path,
    series,
    title="",
    xlabel="",
    ylabel="",
    logx=False,
    logy=False,
    vlines=(),
):
    """Write a multi-series line chart.

    ``series`` is a list of ``(label, xs, ys)``; non-finite points (and
    non-positive ones on log axes) are dropped.
    """

    def keep(x, y):
        if not (math.isfinite(x) and math.isfinite(y)):
            return False
        return not ((logx and x <= 0) or (logy and y <= 0))

    cleaned = []
    for label, xs, ys in series:
        pts = [(float(x), float(y)) for x, y in zip(xs, ys) if keep(float(x), float(y))]
        cleaned.append((label, pts))
    all_pts = [p for _, pts in cleaned for p in pts]
    if not all_pts:
        all_pts = [(1.0, 1.0)]

    fx = math.log10 if logx else (lambda v: v)
    fy = math.log10 if logy else (lambda v: v)
    xs = [fx(x) for x, _ in all_pts] + [fx(v) for v in vlines if (v > 0 or not logx)]
    ys = [fy(y) for _, y in all_pts]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def px(x):
        return LEFT + (fx(x) - x_lo) / (x_hi - x_lo) * pw

    def py(y):
        return TOP + ph - (fy(y) - y_lo) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{W / 2}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<text x="{LEFT + pw / 2}" y="{H - 12}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="16" y="{TOP + ph / 2}" text-anchor="middle" transform="rotate(-90 16 {TOP + ph / 2})">{escape(ylabel)}</text>',
    ]
    for t in _ticks(x_lo, x_hi, logx):
        v = fx(t)
        if x_lo <= v <= x_hi:
            X = LEFT + (v - x_lo) / (x_hi - x_lo) * pw
            out.append(f'<line x1="{X:.1f}" y1="{TOP + ph}" x2="{X:.1f}" y2="{TOP + ph + 4}" stroke="black"/>')
            out.append(f'<text x="{X:.1f}" y="{TOP + ph + 16}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(y_lo, y_hi, logy):
        v = fy(t)
        if y_lo <= v <= y_hi:
            Y = TOP + ph - (v - y_lo) / (y_hi - y_lo) * ph
            out.append(f'<line x1="{LEFT - 4}" y1="{Y:.1f}" x2="{LEFT}" y2="{Y:.1f}" stroke="black"/>')
            out.append(f'<text x="{LEFT - 6}" y="{Y + 4:.1f}" text-anchor="end">{t:g}</text>')
    for v in vlines:
        if logx and v <= 0:
            continue
        X = px(v)
        out.append(f'<line x1="{X:.1f}" y1="{TOP}" x2="{X:.1f}" y2="{TOP + ph}" stroke="black" stroke-dasharray="4,3"/>')
    for i, (label, pts) in enumerate(cleaned):
        color = PALETTE[i % len(PALETTE)]
        if pts:
            d = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.4" points="{d}"/>')
        ly = TOP + 14 + 16 * i
        out.append(f'<line x1="{W - RIGHT + 10}" y1="{ly - 4}" x2="{W - RIGHT + 30}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{W - RIGHT + 34}" y="{ly}">{escape(str(label))}</text>')
    out.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(out) + "\n", encoding="utf-8")
    return path
