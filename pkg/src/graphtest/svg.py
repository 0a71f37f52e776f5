"""Minimal static SVG line charts for power curves."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 150, 40, 60


def _num(x: float) -> str:
    return format(x, ".6g")


def power_chart(title: str, series: dict[str, list[tuple[float, float]]], x_label: str,
                log2_x: bool = False) -> str:
    """Render ``{name: [(x, power), ...]}`` as an SVG 1.1 document."""
    xs = sorted({x for pts in series.values() for x, _ in pts})
    if not xs:
        raise ValueError("nothing to plot")
    tx = (lambda v: math.log2(v)) if log2_x else (lambda v: float(v))
    lo, hi = tx(xs[0]), tx(xs[-1])
    if hi == lo:
        lo, hi = lo - 1, hi + 1
    pw = WIDTH - LEFT - RIGHT
    ph = HEIGHT - TOP - BOTTOM

    def px(v):
        return LEFT + (tx(v) - lo) / (hi - lo) * pw

    def py(p):
        return TOP + (1.0 - p) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2 - RIGHT / 2}" y="22" text-anchor="middle" font-family="sans-serif" '
        f'font-size="15">{escape(title)}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for p in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0):
        y = _num(py(p))
        out.append(f'<line x1="{LEFT - 5}" y1="{y}" x2="{LEFT}" y2="{y}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{y}" dy="4" text-anchor="end" font-family="sans-serif" '
                   f'font-size="11">{p:.1f}</text>')
    for v in xs:
        x = _num(px(v))
        tick = f"2^{int(round(math.log2(v)))}" if log2_x and float(math.log2(v)).is_integer() else _num(v)
        out.append(f'<line x1="{x}" y1="{TOP + ph}" x2="{x}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x}" y="{TOP + ph + 18}" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="11">{escape(tick)}</text>')
    out.append(f'<text x="{LEFT + pw / 2}" y="{HEIGHT - 15}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="13">{escape(x_label)}</text>')
    out.append(f'<text x="18" y="{TOP + ph / 2}" text-anchor="middle" font-family="sans-serif" font-size="13" '
               f'transform="rotate(-90 18 {TOP + ph / 2})">power</text>')
    for i, (name, pts) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        pts = sorted(pts)
        coords = " ".join(f"{_num(px(x))},{_num(py(p))}" for x, p in pts)
        out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')
        ly = TOP + 14 + 18 * i
        lx = LEFT + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 28}" y="{ly}" dy="4" font-family="sans-serif" font-size="12">'
                   f'{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
