"""Minimal self-contained SVG line charts of mean error versus time."""

import math
from xml.sax.saxutils import escape

import numpy as np

from ..exceptions import EmptyReport

PLOT_FLOOR = 1e-16
WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=170, top=40, bottom=50)
COLORS = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def _series(report):
    """``[(label, t, mean error)]`` for each estimator / axis value pair."""
    out = []
    multi = len(report.estimators()) > 1
    for est in report.estimators():
        for value in report.axis_values():
            t, errs = report.trace(est, value)
            if t.size == 0:
                continue
            label = f"{report.axis_name}={value}"
            if multi:
                label = f"{est} {label}"
            out.append((label, t, errs.mean(axis=0)))
    return out


def emit_plot(report, path, title=None):
    """Write an SVG chart with a log10 error axis; one polyline per series.

    Errors below ``1e-16`` (including exact zeros) are drawn at that floor.
    """
    if len(report) == 0:
        raise EmptyReport("cannot plot an empty report")
    series = _series(report)
    x_max = max(float(t.max()) for _, t, _ in series)
    x_min = min(float(t.min()) for _, t, _ in series)
    logs = [np.log10(np.maximum(e, PLOT_FLOOR)) for _, _, e in series]
    y_lo = math.floor(min(float(l.min()) for l in logs))
    y_hi = max(math.ceil(max(float(l.max()) for l in logs)), y_lo + 1)
    if x_max == x_min:
        x_min, x_max = x_min - 1, x_max + 1

    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(x):
        return MARGIN["left"] + (x - x_min) / (x_max - x_min) * pw

    def sy(y):
        return MARGIN["top"] + (y_hi - y) / (y_hi - y_lo) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="20" text-anchor="middle" font-size="14">'
        f"{escape(title or report.name)}</text>",
    ]
    x0, x1 = sx(x_min), sx(x_max)
    ybot, ytop = sy(y_lo), sy(y_hi)
    parts.append(f'<line x1="{x0:.1f}" y1="{ybot:.1f}" x2="{x1:.1f}" y2="{ybot:.1f}" stroke="black"/>')
    parts.append(f'<line x1="{x0:.1f}" y1="{ybot:.1f}" x2="{x0:.1f}" y2="{ytop:.1f}" stroke="black"/>')
    step = max(1, (y_hi - y_lo) // 8)
    for dec in range(y_lo, y_hi + 1, step):
        y = sy(dec)
        parts.append(f'<line x1="{x0 - 4:.1f}" y1="{y:.1f}" x2="{x0:.1f}" y2="{y:.1f}" stroke="black"/>')
        parts.append(f'<text x="{x0 - 8:.1f}" y="{y + 4:.1f}" text-anchor="end">1e{dec}</text>')
    for frac in (0.0, 0.5, 1.0):
        xv = x_min + frac * (x_max - x_min)
        parts.append(
            f'<text x="{sx(xv):.1f}" y="{ybot + 18:.1f}" text-anchor="middle">{xv:.0f}</text>'
        )
    parts.append(
        f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">t (vectors)</text>'
    )
    parts.append(
        f'<text x="16" y="{(ybot + ytop) / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {(ybot + ytop) / 2:.1f})">mean error</text>'
    )
    for i, ((label, t, _), ly) in enumerate(zip(series, logs)):
        color = COLORS[i % len(COLORS)]
        pts = " ".join(f"{sx(float(x)):.2f},{sy(float(y)):.2f}" for x, y in zip(t, ly))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly_leg = MARGIN["top"] + 14 * i
        lx = WIDTH - MARGIN["right"] + 10
        parts.append(f'<rect x="{lx}" y="{ly_leg - 8}" width="10" height="3" fill="{color}"/>')
        parts.append(f'<text x="{lx + 14}" y="{ly_leg - 3}">{escape(label)}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
