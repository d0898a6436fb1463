"""Minimal hand-emitted SVG histograms with a semicircle density overlay.

No plotting dependency: bars are <rect> elements, axes are <line>
elements, and the overlay curve is the single <path> in the document.
"""
from __future__ import annotations

import math

import numpy as np

from .spectra import semicircle_pdf

WIDTH, HEIGHT = 640, 400
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 55, 15, 20, 35
OVERLAY_POINTS = 512


def freedman_diaconis_bins(values: np.ndarray) -> int:
    """Bin count from the Freedman-Diaconis width 2*IQR/n^(1/3)."""
    n = values.size
    span = float(values.max() - values.min())
    q75, q25 = np.percentile(values, [75.0, 25.0])
    h = 2.0 * (q75 - q25) / n ** (1.0 / 3.0)
    if h <= 0.0 or span <= 0.0:
        return max(1, int(math.ceil(math.sqrt(n))))
    return min(400, max(1, int(math.ceil(span / h))))


def histogram_svg(values, bins: int | None = None, title: str = "") -> str:
    """Density-normalized histogram of `values` with the semicircle density
    drawn on top, returned as a complete SVG document."""
    values = np.sort(np.asarray(values, dtype=np.float64))
    if values.size == 0:
        raise ValueError("cannot plot an empty value list")
    nbins = bins if bins is not None else freedman_diaconis_bins(values)
    x_lo = min(float(values[0]), -2.2)
    x_hi = max(float(values[-1]), 2.2)
    if x_hi <= x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    counts, edges = np.histogram(values, bins=nbins, range=(x_lo, x_hi))
    widths = np.diff(edges)
    density = counts / (values.size * widths)

    y_max = 1.05 * max(float(density.max()), 1.0 / math.pi)
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x: float) -> float:
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return MARGIN_T + (1.0 - y / y_max) * plot_h

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">\n'
    ]
    if title:
        parts.append(f'<text x="{WIDTH / 2:.1f}" y="14" font-size="12" '
                     f'text-anchor="middle">{_escape(title)}</text>\n')

    for k in range(nbins):
        if counts[k] == 0:
            continue
        x0, x1 = sx(edges[k]), sx(edges[k + 1])
        y0 = sy(float(density[k]))
        parts.append(
            f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{x1 - x0:.2f}" '
            f'height="{sy(0.0) - y0:.2f}" fill="#9ecae1" stroke="#6baed6" '
            f'stroke-width="0.5"/>\n'
        )

    # overlay: semicircle density sampled at 512 points over its support
    xs = np.linspace(-2.0, 2.0, OVERLAY_POINTS)
    ys = semicircle_pdf(xs)
    cmds = [f"M {sx(xs[0]):.2f} {sy(float(ys[0])):.2f}"]
    cmds += [f"L {sx(float(x)):.2f} {sy(float(y)):.2f}" for x, y in zip(xs[1:], ys[1:])]
    parts.append(f'<path d="{" ".join(cmds)}" fill="none" stroke="#d62728" '
                 f'stroke-width="1.5"/>\n')

    # axes and a few ticks
    parts.append(f'<line x1="{MARGIN_L}" y1="{sy(0.0):.2f}" x2="{WIDTH - MARGIN_R}" '
                 f'y2="{sy(0.0):.2f}" stroke="#333333" stroke-width="1"/>\n')
    parts.append(f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" '
                 f'y2="{sy(0.0):.2f}" stroke="#333333" stroke-width="1"/>\n')
    for xt in _ticks(x_lo, x_hi):
        parts.append(f'<line x1="{sx(xt):.2f}" y1="{sy(0.0):.2f}" x2="{sx(xt):.2f}" '
                     f'y2="{sy(0.0) + 4:.2f}" stroke="#333333" stroke-width="1"/>\n')
        parts.append(f'<text x="{sx(xt):.2f}" y="{sy(0.0) + 16:.2f}" font-size="10" '
                     f'text-anchor="middle">{xt:g}</text>\n')
    for yt in (0.0, 0.1, 0.2, 0.3):
        if yt > y_max:
            continue
        parts.append(f'<line x1="{MARGIN_L - 4}" y1="{sy(yt):.2f}" x2="{MARGIN_L}" '
                     f'y2="{sy(yt):.2f}" stroke="#333333" stroke-width="1"/>\n')
        parts.append(f'<text x="{MARGIN_L - 7}" y="{sy(yt) + 3:.2f}" font-size="10" '
                     f'text-anchor="end">{yt:g}</text>\n')
    parts.append("</svg>\n")
    return "".join(parts)


def _ticks(lo: float, hi: float) -> list[float]:
    step = _nice_step((hi - lo) / 6.0)
    first = math.ceil(lo / step) * step
    out = []
    t = first
    while t <= hi + 1e-12:
        out.append(round(t, 10))
        t += step
    return out


def _nice_step(raw: float) -> float:
    mag = 10.0 ** math.floor(math.log10(max(raw, 1e-12)))
    for m in (1.0, 2.0, 2.5, 5.0, 10.0):
        if m * mag >= raw:
            return m * mag
    return 10.0 * mag


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
