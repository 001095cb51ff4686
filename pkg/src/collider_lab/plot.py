"""Minimal static SVG line charts for odds-ratio curves."""

from __future__ import annotations

import math
from typing import Dict, Optional, Sequence
from xml.sax.saxutils import escape

PALETTE = ("#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d")

WIDTH, HEIGHT = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 60, 150, 30, 45


def _ticks(lo: float, hi: float, count: int = 5):
    if hi == lo:
        return [lo]
    return [lo + k * (hi - lo) / (count - 1) for k in range(count)]


def line_chart(
    x: Sequence[float],
    series: Dict[str, Sequence[Optional[float]]],
    title: str = "",
    xlabel: str = "",
    log_y: bool = True,
    reference: Optional[float] = 1.0,
) -> str:
    """Render the series against x; None values break the line."""
    tf = math.log if log_y else (lambda v: v)
    ys = [tf(v) for vals in series.values() for v in vals if v is not None and (v > 0 or not log_y)]
    if reference is not None:
        ys.append(tf(reference))
    if not ys:
        ys = [0.0]
    y_lo, y_hi = min(ys), max(ys)
    if y_hi - y_lo < 1e-9:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad
    x_lo, x_hi = min(x), max(x)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(v):
        return LEFT + (v - x_lo) / (x_hi - x_lo) * pw

    def py(v):
        return TOP + (1 - (tf(v) - y_lo) / (y_hi - y_lo)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
        f'<text x="{WIDTH / 2:.1f}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<text x="{LEFT + pw / 2:.1f}" y="{HEIGHT - 8}" text-anchor="middle">{escape(xlabel)}</text>',
    ]
    for t in _ticks(x_lo, x_hi):
        out.append(f'<text x="{px(t):.1f}" y="{TOP + ph + 16}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(y_lo, y_hi):
        label = math.exp(t) if log_y else t
        yy = TOP + (1 - (t - y_lo) / (y_hi - y_lo)) * ph
        out.append(f'<text x="{LEFT - 6}" y="{yy + 4:.1f}" text-anchor="end">{label:.3g}</text>')
    if reference is not None:
        yr = py(reference)
        out.append(
            f'<line x1="{LEFT}" x2="{LEFT + pw}" y1="{yr:.1f}" y2="{yr:.1f}" '
            'stroke="#888" stroke-dasharray="4 3"/>'
        )
    for i, (name, vals) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        segments, current = [], []
        for xv, yv in zip(x, vals):
            if yv is None or (log_y and yv <= 0):
                if current:
                    segments.append(current)
                current = []
                continue
            current.append(f"{px(xv):.2f},{py(yv):.2f}")
        if current:
            segments.append(current)
        for seg in segments:
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.6" points="{" ".join(seg)}"/>')
        ly = TOP + 14 + 16 * i
        out.append(f'<line x1="{WIDTH - RIGHT + 12}" x2="{WIDTH - RIGHT + 32}" y1="{ly}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{WIDTH - RIGHT + 38}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
