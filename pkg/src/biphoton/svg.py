"""Minimal SVG line plots: every column drawn against the first."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def line_plot(x, series: dict[str, np.ndarray], xlabel: str = "", ylabel: str = "",
              title: str = "", width: int = 640, height: int = 400) -> str:
    x = np.asarray(x, dtype=float)
    left, right, top, bottom = 70, 150, 30, 50
    pw, ph = width - left - right, height - top - bottom

    finite = [np.asarray(v, dtype=float) for v in series.values()]
    ys = np.concatenate([v[np.isfinite(v)] for v in finite]) if finite else np.zeros(1)
    if ys.size == 0:
        ys = np.zeros(1)
    xlo, xhi = float(np.nanmin(x)), float(np.nanmax(x))
    ylo, yhi = float(ys.min()), float(ys.max())
    if xhi == xlo:
        xhi = xlo + 1.0
    if yhi == ylo:
        yhi = ylo + 1.0

    def px(v):
        return left + (v - xlo) / (xhi - xlo) * pw

    def py(v):
        return top + (yhi - v) / (yhi - ylo) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for t in _ticks(xlo, xhi):
        out.append(f'<text x="{px(t):.2f}" y="{top + ph + 16}" font-size="10" '
                   f'text-anchor="middle">{t:.4g}</text>')
    for t in _ticks(ylo, yhi):
        out.append(f'<text x="{left - 6}" y="{py(t) + 3:.2f}" font-size="10" '
                   f'text-anchor="end">{t:.4g}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{height - 10}" font-size="12" '
               f'text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="14" y="{top + ph / 2}" font-size="12" text-anchor="middle" '
               f'transform="rotate(-90 14 {top + ph / 2})">{escape(ylabel)}</text>')
    if title:
        out.append(f'<text x="{left + pw / 2}" y="18" font-size="13" '
                   f'text-anchor="middle">{escape(title)}</text>')

    for i, (name, y) in enumerate(series.items()):
        colour = PALETTE[i % len(PALETTE)]
        y = np.asarray(y, dtype=float)
        # break the line at non-finite samples
        segments, current = [], []
        for xv, yv in zip(x, y):
            if math.isfinite(xv) and math.isfinite(yv):
                current.append(f"{px(xv):.2f},{py(yv):.2f}")
            elif current:
                segments.append(current)
                current = []
        if current:
            segments.append(current)
        for seg in segments:
            out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" '
                       f'points="{" ".join(seg)}"/>')
        ly = top + 14 * (i + 1)
        out.append(f'<line x1="{left + pw + 10}" y1="{ly - 4}" x2="{left + pw + 30}" y2="{ly - 4}" '
                   f'stroke="{colour}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 34}" y="{ly}" font-size="10">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
