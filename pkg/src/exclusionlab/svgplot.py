"""Minimal self-contained SVG emission: line plots and heatmaps.

Deliberately dependency-free so report figures can be produced anywhere the
package runs.
"""

from __future__ import annotations

import math
from pathlib import Path

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
            "#17becf", "#7f7f7f")

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 64, 20, 34, 48


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    step = 10.0 ** math.floor(math.log10(span / n))
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= n:
            step *= mult
            break
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-12 * span:
        out.append(round(v, 12))
        v += step
    return out


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def line_plot(series, path: str | Path, title: str = "", xlabel: str = "",
              ylabel: str = "") -> None:
    """Write a line plot.  ``series`` is a list of (x, y, label) triples."""
    xs = [float(v) for x, _, _ in series for v in x]
    ys = [float(v) for _, y, _ in series for v in y]
    if not xs:
        raise ValueError("no data to plot")
    xlo, xhi = min(xs), max(xs)
    ylo, yhi = min(ys), max(ys)
    if yhi == ylo:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    pad = 0.05 * (yhi - ylo)
    ylo, yhi = ylo - pad, yhi + pad
    pw, ph = _W - _ML - _MR, _H - _MT - _MB

    def sx(v):
        return _ML + (v - xlo) / (xhi - xlo) * pw if xhi > xlo else _ML + pw / 2

    def sy(v):
        return _MT + (yhi - v) / (yhi - ylo) * ph

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
             f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
             f'<rect width="{_W}" height="{_H}" fill="white"/>',
             f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" '
             f'stroke="black" stroke-width="1"/>']
    for tv in _ticks(xlo, xhi):
        if xlo <= tv <= xhi:
            parts.append(f'<line x1="{sx(tv):.1f}" y1="{_MT + ph}" x2="{sx(tv):.1f}" '
                         f'y2="{_MT + ph + 4}" stroke="black"/>')
            parts.append(f'<text x="{sx(tv):.1f}" y="{_MT + ph + 17}" '
                         f'text-anchor="middle">{tv:g}</text>')
    for tv in _ticks(ylo, yhi):
        if ylo <= tv <= yhi:
            parts.append(f'<line x1="{_ML - 4}" y1="{sy(tv):.1f}" x2="{_ML}" '
                         f'y2="{sy(tv):.1f}" stroke="black"/>')
            parts.append(f'<text x="{_ML - 7}" y="{sy(tv) + 4:.1f}" '
                         f'text-anchor="end">{tv:g}</text>')
    for i, (x, y, label) in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        pts = " ".join(f"{sx(float(a)):.2f},{sy(float(b)):.2f}" for a, b in zip(x, y))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     f'stroke-width="1.7"/>')
        ly = _MT + 16 + 15 * i
        parts.append(f'<line x1="{_ML + pw - 130}" y1="{ly - 4}" x2="{_ML + pw - 105}" '
                     f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{_ML + pw - 100}" y="{ly}">{_esc(str(label))}</text>')
    if title:
        parts.append(f'<text x="{_W / 2}" y="20" text-anchor="middle" '
                     f'font-size="14">{_esc(title)}</text>')
    if xlabel:
        parts.append(f'<text x="{_ML + pw / 2}" y="{_H - 10}" '
                     f'text-anchor="middle">{_esc(xlabel)}</text>')
    if ylabel:
        parts.append(f'<text x="16" y="{_MT + ph / 2}" text-anchor="middle" '
                     f'transform="rotate(-90 16 {_MT + ph / 2})">{_esc(ylabel)}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts))


def _diverging_color(v: float) -> str:
    """Blue-white-red map for v in [-1, 1]."""
    v = max(-1.0, min(1.0, v))
    if v < 0:
        t = 1.0 + v
        r, g, b = int(255 * t), int(255 * t), 255
    else:
        t = 1.0 - v
        r, g, b = 255, int(255 * t), int(255 * t)
    return f"rgb({r},{g},{b})"


def heatmap(matrix, path: str | Path, title: str = "", symmetric_scale: bool = True) -> None:
    """Write a heatmap of a 2-d array with a blue-white-red diverging scale."""
    import numpy as np
    m = np.asarray(matrix, dtype=float)
    vmax = float(np.abs(m).max()) or 1.0
    lo = -vmax if symmetric_scale else float(m.min())
    hi = vmax if symmetric_scale else float(m.max())
    rows, cols = m.shape
    pw, ph = _W - _ML - _MR - 40, _H - _MT - _MB
    cw, ch = pw / cols, ph / rows
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
             f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
             f'<rect width="{_W}" height="{_H}" fill="white"/>']
    for i in range(rows):
        for j in range(cols):
            v = (2.0 * (m[i, j] - lo) / (hi - lo) - 1.0) if hi > lo else 0.0
            parts.append(f'<rect x="{_ML + j * cw:.2f}" y="{_MT + (rows - 1 - i) * ch:.2f}" '
                         f'width="{cw + 0.5:.2f}" height="{ch + 0.5:.2f}" '
                         f'fill="{_diverging_color(v)}"/>')
    # colorbar
    cb_x = _ML + pw + 14
    for k in range(60):
        v = 1.0 - 2.0 * k / 59.0
        parts.append(f'<rect x="{cb_x}" y="{_MT + k * ph / 60:.2f}" width="14" '
                     f'height="{ph / 60 + 0.5:.2f}" fill="{_diverging_color(v)}"/>')
    parts.append(f'<text x="{cb_x + 18}" y="{_MT + 10}">{hi:.3g}</text>')
    parts.append(f'<text x="{cb_x + 18}" y="{_MT + ph}">{lo:.3g}</text>')
    parts.append(f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" '
                 f'stroke="black"/>')
    if title:
        parts.append(f'<text x="{_W / 2}" y="20" text-anchor="middle" '
                     f'font-size="14">{_esc(title)}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts))
