"""SVG scatter plots of path loss versus log-distance with fitted model lines.

Output is plain text built by hand so identical inputs give byte-identical
documents.  Markers and lines carry ``data-*`` attributes with the values in
physical units (meters, dB) for downstream checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import quoteattr, escape

from .dataset import Dataset
from .errors import DomainError
from .estimation import FitResult

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
DASHES = ("", "6,3", "2,3", "8,3,2,3")
PADDING = 0.05


@dataclass(frozen=True)
class PlotStyle:
    width: int = 720
    height: int = 480
    margin_left: int = 70
    margin_right: int = 20
    margin_top: int = 40
    margin_bottom: int = 60
    marker_radius: float = 3.0
    title: str = "Path loss vs. distance"


def _num(x: float) -> str:
    return f"{x:.2f}"


def _padded(lo: float, hi: float):
    span = hi - lo
    if span == 0:
        span = 1.0
    return lo - PADDING * span, hi + PADDING * span


def _decade_ticks(lo_log: float, hi_log: float):
    ticks = []
    for k in range(math.floor(lo_log), math.ceil(hi_log) + 1):
        for m in (1, 2, 5):
            v = m * 10.0**k
            if lo_log <= math.log10(v) <= hi_log:
                ticks.append(v)
    return ticks


def _linear_ticks(lo: float, hi: float, step: float = 10.0):
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-9:
        ticks.append(v)
        v += step
    return ticks


def fit_lines(ds: Dataset, fits: Sequence[FitResult]):
    """``[(fit, freq, d_start, d_end, pl_start, pl_end), ...]`` over the observed distances."""
    dmin, dmax = ds.distance_range()
    data_freqs = set(ds.frequency_set())
    lines = []
    for fit in fits:
        for f in fit.frequency_set:
            if f not in data_freqs:
                continue
            pl0 = float(fit.params.evaluate(f, dmin))
            pl1 = float(fit.params.evaluate(f, dmax))
            lines.append((fit, f, dmin, dmax, pl0, pl1))
    return lines


def _legend_label(fit: FitResult) -> str:
    parts = []
    for k, v in fit.params.as_dict().items():
        if k == "f0":
            continue
        parts.append(f"{k}={v:.2f}")
    if fit.f0_used is not None:
        parts.append(f"f0={fit.f0_used:g} GHz")
    return f"{fit.model}: {', '.join(parts)}, σ={fit.sigma:.2f} dB"


def emit_plot(ds: Dataset, fits: Sequence[FitResult] = (), style: PlotStyle = PlotStyle()) -> str:
    """Render samples and fitted lines as an SVG document string."""
    if not len(ds):
        raise DomainError("cannot plot an empty dataset")
    lines = fit_lines(ds, fits)

    logd = [math.log10(s.dist) for s in ds.samples]
    pls = [s.path_loss for s in ds.samples]
    for _, _, _, _, pl0, pl1 in lines:
        pls.extend((pl0, pl1))
    x_lo, x_hi = _padded(min(logd), max(logd))
    y_lo, y_hi = _padded(min(pls), max(pls))

    left, top = style.margin_left, style.margin_top
    right = style.width - style.margin_right
    bottom = style.height - style.margin_bottom

    def px(d):
        return left + (math.log10(d) - x_lo) / (x_hi - x_lo) * (right - left)

    def py(pl):
        return bottom - (pl - y_lo) / (y_hi - y_lo) * (bottom - top)

    freqs = ds.frequency_set()
    color = {f: PALETTE[i % len(PALETTE)] for i, f in enumerate(freqs)}

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{style.width}" height="{style.height}" '
        f'viewBox="0 0 {style.width} {style.height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{style.width}" height="{style.height}" fill="white"/>',
        f'<text x="{style.width / 2:.2f}" y="{top - 15}" text-anchor="middle" font-size="14">'
        f"{escape(style.title)}</text>",
        f'<g class="plot-area" data-x-min-m="{10 ** x_lo:.6g}" data-x-max-m="{10 ** x_hi:.6g}" '
        f'data-y-min-db="{y_lo:.6g}" data-y-max-db="{y_hi:.6g}" '
        f'data-left="{left}" data-right="{right}" data-top="{top}" data-bottom="{bottom}">',
        f'<rect x="{left}" y="{top}" width="{right - left}" height="{bottom - top}" '
        'fill="none" stroke="black"/>',
    ]

    out.append('<g class="axes" stroke="#cccccc">')
    for v in _decade_ticks(x_lo, x_hi):
        x = _num(px(v))
        out.append(f'<line x1="{x}" y1="{top}" x2="{x}" y2="{bottom}"/>')
        out.append(f'<text x="{x}" y="{bottom + 16}" text-anchor="middle" stroke="none" fill="black">{v:g}</text>')
    for v in _linear_ticks(y_lo, y_hi):
        y = _num(py(v))
        out.append(f'<line x1="{left}" y1="{y}" x2="{right}" y2="{y}"/>')
        out.append(f'<text x="{left - 6}" y="{y}" text-anchor="end" dominant-baseline="middle" '
                   f'stroke="none" fill="black">{v:g}</text>')
    out.append("</g>")
    out.append(f'<text x="{(left + right) / 2:.2f}" y="{style.height - 15}" text-anchor="middle">'
               "T-R separation distance (m, log scale)</text>")
    out.append(f'<text transform="translate(18 {(top + bottom) / 2:.2f}) rotate(-90)" '
               'text-anchor="middle">Path loss (dB)</text>')

    out.append('<g class="samples">')
    for s in ds.samples:
        out.append(
            f'<circle class="sample" cx="{_num(px(s.dist))}" cy="{_num(py(s.path_loss))}" '
            f'r="{style.marker_radius:g}" fill="none" stroke="{color[s.freq]}" '
            f'data-freq-ghz="{s.freq:g}" data-d-m="{s.dist:.6g}" data-pl-db="{s.path_loss:.6g}"/>'
        )
    out.append("</g>")

    out.append('<g class="fits">')
    model_index = {}
    for fit, f, d0, d1, pl0, pl1 in lines:
        dash = DASHES[model_index.setdefault(id(fit), len(model_index)) % len(DASHES)]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(
            f'<line class="fit" x1="{_num(px(d0))}" y1="{_num(py(pl0))}" x2="{_num(px(d1))}" '
            f'y2="{_num(py(pl1))}" stroke="{color[f]}" stroke-width="1.5"{dash_attr} '
            f'data-model="{fit.model}" data-freq-ghz="{f:g}" data-d-start-m="{d0:.6g}" '
            f'data-d-end-m="{d1:.6g}" data-pl-start-db="{pl0:.6g}" data-pl-end-db="{pl1:.6g}"/>'
        )
    out.append("</g>")
    out.append("</g>")

    out.append('<g class="legend">')
    y = top + 14
    for f in freqs:
        out.append(f'<circle cx="{left + 12}" cy="{y - 4}" r="3" fill="none" stroke="{color[f]}"/>')
        out.append(f'<text x="{left + 22}" y="{y}">{f:g} GHz data</text>')
        y += 16
    for fit in fits:
        out.append(f"<text x=\"{left + 12}\" y=\"{y}\" data-model={quoteattr(fit.model)}>"
                   f"{escape(_legend_label(fit))}</text>")
        y += 16
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
