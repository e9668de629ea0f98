"""Small deterministic SVG chart writer.

Produces self-contained SVG line/scatter charts with error bars, tick labels,
and a legend.  Output is a pure function of the inputs: no timestamps, no
random identifiers, fixed float formatting.  This keeps rendered charts
byte-identical across runs, which the command-line tools rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

PALETTE = ("#1f6fb2", "#d95f02", "#2a9d3c", "#7a4fa3", "#c23b77")

_MARGIN_LEFT = 64.0
_MARGIN_RIGHT = 16.0
_MARGIN_TOP = 34.0
_MARGIN_BOTTOM = 46.0


@dataclass(frozen=True)
class Series:
    """One plottable series: points, a line, or both, with optional y errors."""

    xs: Sequence[float]
    ys: Sequence[float]
    yerr: Optional[Sequence[float]] = None
    label: str = ""
    style: str = "points"  # "points", "line", or "points+line"
    color: Optional[str] = None

    def __post_init__(self):
        if len(self.xs) != len(self.ys):
            raise ValueError("xs and ys must have equal length")
        if self.yerr is not None and len(self.yerr) != len(self.ys):
            raise ValueError("yerr must match ys length")
        if self.style not in ("points", "line", "points+line"):
            raise ValueError(f"unknown style {self.style!r}")


def _fmt(value: float) -> str:
    """Fixed coordinate formatting: two decimals, no negative zero."""
    text = f"{value:.2f}"
    return "0.00" if text == "-0.00" else text


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;"))


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list:
    """Round tick positions using a 1-2-5 step ladder."""
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("axis range must be finite")
    if hi <= lo:
        hi = lo + (abs(lo) if lo else 1.0)
    span = hi - lo
    raw = span / max(target, 2)
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(s * mag for s in (1.0, 2.0, 5.0, 10.0) if raw <= s * mag + 1e-12)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = first
    while t <= hi + step * 1e-9:
        ticks.append(0.0 if abs(t) < step * 1e-9 else t)
        t += step
    return ticks


def _tick_label(value: float) -> str:
    return f"{value:.10g}"


def _data_range(series: Sequence[Series], pad_frac: float = 0.06) -> tuple:
    xs = [float(x) for s in series for x in s.xs]
    ys = []
    for s in series:
        err = s.yerr if s.yerr is not None else [0.0] * len(s.ys)
        for y, e in zip(s.ys, err):
            ys.append(float(y) - float(e))
            ys.append(float(y) + float(e))
    if not xs or not ys:
        raise ValueError("nothing to plot")
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    x_pad = (x_hi - x_lo) * pad_frac
    y_pad = (y_hi - y_lo) * pad_frac
    return x_lo - x_pad, x_hi + x_pad, y_lo - y_pad, y_hi + y_pad


def render_chart(series: Sequence[Series], title: str = "", xlabel: str = "",
                 ylabel: str = "", width: int = 640, height: int = 440) -> str:
    """Render series to an SVG string (deterministic for fixed inputs)."""
    if not series:
        raise ValueError("nothing to plot")
    x_lo, x_hi, y_lo, y_hi = _data_range(series)
    plot_w = width - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = height - _MARGIN_TOP - _MARGIN_BOTTOM

    def sx(x: float) -> float:
        return _MARGIN_LEFT + (float(x) - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return _MARGIN_TOP + plot_h - (float(y) - y_lo) / (y_hi - y_lo) * plot_h

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">'
    )
    out.append(f'<rect width="{width}" height="{height}" fill="#ffffff"/>')
    out.append(
        f'<rect x="{_fmt(_MARGIN_LEFT)}" y="{_fmt(_MARGIN_TOP)}" '
        f'width="{_fmt(plot_w)}" height="{_fmt(plot_h)}" fill="none" '
        f'stroke="#333333" stroke-width="1"/>'
    )
    font = 'font-family="Helvetica,Arial,sans-serif"'
    # gridlines and tick labels
    for t in _nice_ticks(x_lo, x_hi):
        px = sx(t)
        out.append(
            f'<line x1="{_fmt(px)}" y1="{_fmt(_MARGIN_TOP)}" x2="{_fmt(px)}" '
            f'y2="{_fmt(_MARGIN_TOP + plot_h)}" stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(px)}" y="{_fmt(_MARGIN_TOP + plot_h + 16)}" '
            f'{font} font-size="11" text-anchor="middle" fill="#333333">'
            f'{_escape(_tick_label(t))}</text>'
        )
    for t in _nice_ticks(y_lo, y_hi):
        py = sy(t)
        out.append(
            f'<line x1="{_fmt(_MARGIN_LEFT)}" y1="{_fmt(py)}" '
            f'x2="{_fmt(_MARGIN_LEFT + plot_w)}" y2="{_fmt(py)}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(_MARGIN_LEFT - 6)}" y="{_fmt(py + 4)}" '
            f'{font} font-size="11" text-anchor="end" fill="#333333">'
            f'{_escape(_tick_label(t))}</text>'
        )
    # series
    colors = [s.color or PALETTE[i % len(PALETTE)] for i, s in enumerate(series)]
    for i, s in enumerate(series):
        color = colors[i]
        if "line" in s.style and len(s.xs) >= 2:
            pts = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(s.xs, s.ys))
            out.append(
                f'<polyline points="{pts}" fill="none" stroke="{color}" '
                f'stroke-width="1.5"/>'
            )
        if s.yerr is not None:
            for x, y, e in zip(s.xs, s.ys, s.yerr):
                if e <= 0:
                    continue
                px, y0, y1 = sx(x), sy(y - e), sy(y + e)
                out.append(
                    f'<line x1="{_fmt(px)}" y1="{_fmt(y0)}" x2="{_fmt(px)}" '
                    f'y2="{_fmt(y1)}" stroke="{color}" stroke-width="1"/>'
                )
                for yy in (y0, y1):
                    out.append(
                        f'<line x1="{_fmt(px - 3)}" y1="{_fmt(yy)}" '
                        f'x2="{_fmt(px + 3)}" y2="{_fmt(yy)}" '
                        f'stroke="{color}" stroke-width="1"/>'
                    )
        if "points" in s.style:
            for x, y in zip(s.xs, s.ys):
                out.append(
                    f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="3" '
                    f'fill="{color}"/>'
                )
    # labels
    if title:
        out.append(
            f'<text x="{_fmt(width / 2)}" y="20" {font} font-size="14" '
            f'text-anchor="middle" fill="#111111">{_escape(title)}</text>'
        )
    if xlabel:
        out.append(
            f'<text x="{_fmt(_MARGIN_LEFT + plot_w / 2)}" y="{_fmt(height - 10)}" '
            f'{font} font-size="12" text-anchor="middle" fill="#111111">'
            f'{_escape(xlabel)}</text>'
        )
    if ylabel:
        cx, cy = 16.0, _MARGIN_TOP + plot_h / 2
        out.append(
            f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" {font} font-size="12" '
            f'text-anchor="middle" fill="#111111" '
            f'transform="rotate(-90 {_fmt(cx)} {_fmt(cy)})">{_escape(ylabel)}</text>'
        )
    # legend
    labeled = [(i, s) for i, s in enumerate(series) if s.label]
    for j, (i, s) in enumerate(labeled):
        color = colors[i]
        ly = _MARGIN_TOP + 14 + 16 * j
        lx = _MARGIN_LEFT + plot_w - 150
        out.append(
            f'<line x1="{_fmt(lx)}" y1="{_fmt(ly - 4)}" x2="{_fmt(lx + 18)}" '
            f'y2="{_fmt(ly - 4)}" stroke="{color}" stroke-width="2"/>'
        )
        out.append(
            f'<text x="{_fmt(lx + 24)}" y="{_fmt(ly)}" {font} font-size="11" '
            f'fill="#111111">{_escape(s.label)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_chart(path, series: Sequence[Series], **kwargs) -> None:
    """Render and write a chart to ``path``."""
    svg = render_chart(series, **kwargs)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svg)
