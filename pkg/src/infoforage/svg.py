"""Bare-bones SVG charts (scatter / line) for figure data; no styling beyond axes and a legend."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#7f7f7f", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
W, H, PAD = 640, 420, 56


def _scale(lo, hi, a, b, log=False):
    if log:
        lo, hi = math.log10(lo), math.log10(hi)
    span = (hi - lo) or 1.0

    def f(v):
        v = math.log10(v) if log else v
        return a + (v - lo) / span * (b - a)

    return f


def chart(series, path, *, title="", xlabel="", ylabel="", log_x=False, log_y=False, kind="scatter") -> None:
    """Write ``series`` ({label: (xs, ys)}) as an SVG chart.

    ``kind`` is "scatter" or "line". Non-finite points are skipped.
    """
    pts = {
        label: [(x, y) for x, y in zip(xs, ys) if x is not None and y is not None and math.isfinite(x) and math.isfinite(y)]
        for label, (xs, ys) in series.items()
    }
    allx = [x for p in pts.values() for x, _ in p]
    ally = [y for p in pts.values() for _, y in p]
    if not allx:
        allx, ally = [1.0, 2.0], [1.0, 2.0]
    sx = _scale(min(allx), max(allx), PAD, W - PAD, log_x)
    sy = _scale(min(ally), max(ally), H - PAD, PAD, log_y)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<line x1="{PAD}" y1="{H - PAD}" x2="{W - PAD}" y2="{H - PAD}" stroke="black"/>',
        f'<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{H - PAD}" stroke="black"/>',
        f'<text x="{W / 2}" y="{PAD / 2}" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{W / 2}" y="{H - 12}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>',
        f'<text x="14" y="{H / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 14 {H / 2})">{escape(ylabel)}</text>',
        f'<text x="{PAD}" y="{H - PAD + 16}" font-size="10">{min(allx):.4g}</text>',
        f'<text x="{W - PAD}" y="{H - PAD + 16}" font-size="10" text-anchor="end">{max(allx):.4g}</text>',
        f'<text x="{PAD - 4}" y="{H - PAD}" font-size="10" text-anchor="end">{min(ally):.4g}</text>',
        f'<text x="{PAD - 4}" y="{PAD + 8}" font-size="10" text-anchor="end">{max(ally):.4g}</text>',
    ]
    for k, (label, p) in enumerate(pts.items()):
        color = PALETTE[k % len(PALETTE)]
        if kind == "line" and len(p) > 1:
            d = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in p)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{d}"/>')
        else:
            out.extend(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2" fill="{color}" fill-opacity="0.6"/>' for x, y in p)
        out.append(f'<text x="{W - PAD + 4}" y="{PAD + 14 * (k + 1)}" font-size="10" fill="{color}">{escape(str(label))}</text>')
    out.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")
