"""Minimal static SVG line charts: linear or log y axes, multiple panels per figure."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from html import escape

import numpy as np

WIDTH, HEIGHT = 800, 600
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]
MAX_POINTS = 1500


def fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def _num(v: float, prec: int) -> str:
    if abs(v) < 1e-300:
        return "0"
    if 1e-3 <= abs(v) < 1e6:
        return np.format_float_positional(v, precision=prec, fractional=False, trim="-")
    return f"{v:.{prec}g}"


def tick_labels(values: list[float], log: bool = False) -> list[str]:
    """Shortest %g labels that still tell neighbouring ticks apart."""
    if log:
        return [f"1e{int(round(v))}" for v in values]
    for prec in range(3, 13):
        labels = [_num(v, prec) for v in values]
        if len(set(labels)) == len(labels):
            return labels
    return labels


def nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    return [first + k * step for k in range(int((hi - first) / step + 1e-9) + 1)]


def thin(x, y, max_points: int = MAX_POINTS):
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if len(x) <= max_points:
        return x, y
    idx = np.unique(np.linspace(0, len(x) - 1, max_points).astype(int))
    return x[idx], y[idx]


@dataclass
class Series:
    label: str
    x: np.ndarray
    y: np.ndarray
    dashed: bool = False
    markers: bool = False


@dataclass
class Panel:
    title: str
    xlabel: str
    ylabel: str
    log_y: bool = False
    series: list = field(default_factory=list)
    hlines: list = field(default_factory=list)  # (y, label)

    def add(self, label, x, y, **kw) -> "Panel":
        self.series.append(Series(label, np.asarray(x, float), np.asarray(y, float), **kw))
        return self

    def _data(self):
        out = []
        for s in self.series:
            x, y = s.x, s.y
            keep = np.isfinite(x) & np.isfinite(y)
            if self.log_y:
                keep &= y > 0
            x, y = thin(x[keep], y[keep])
            if self.log_y:
                y = np.log10(y)
            out.append((s, x, y))
        return out

    def render(self, x0: float, y0: float, w: float, h: float) -> str:
        left, right, top, bottom = 70, 15, 28, 45
        px0, px1 = x0 + left, x0 + w - right
        py0, py1 = y0 + top, y0 + h - bottom
        data = self._data()
        hl = [(math.log10(v) if self.log_y else v, lab) for v, lab in self.hlines
              if not self.log_y or v > 0]
        xs = [a for _, x, _ in data for a in (x.min(), x.max()) if len(x)]
        ys = [a for _, _, y in data for a in (y.min(), y.max()) if len(y)] + [v for v, _ in hl]
        xlo, xhi = (min(xs), max(xs)) if xs else (0.0, 1.0)
        ylo, yhi = (min(ys), max(ys)) if ys else (0.0, 1.0)
        if xhi == xlo:
            xhi = xlo + 1.0
        if yhi == ylo:
            pad = abs(ylo) * 0.1 or 1.0
            ylo, yhi = ylo - pad, yhi + pad
        else:
            pad = 0.05 * (yhi - ylo)
            ylo, yhi = ylo - pad, yhi + pad

        def sx(v):
            return px0 + (v - xlo) / (xhi - xlo) * (px1 - px0)

        def sy(v):
            return py1 - (v - ylo) / (yhi - ylo) * (py1 - py0)

        parts = [f'<g font-family="sans-serif" font-size="11">',
                 f'<text x="{fmt((px0 + px1) / 2)}" y="{fmt(y0 + 16)}" text-anchor="middle" '
                 f'font-size="13">{escape(self.title)}</text>',
                 f'<rect x="{fmt(px0)}" y="{fmt(py0)}" width="{fmt(px1 - px0)}" '
                 f'height="{fmt(py1 - py0)}" fill="none" stroke="#000"/>']
        yt = (list(range(math.ceil(ylo), math.floor(yhi) + 1)) if self.log_y
              else nice_ticks(ylo, yhi))
        for v, lab in zip(yt, tick_labels(yt, self.log_y)):
            parts.append(f'<line x1="{fmt(px0 - 4)}" x2="{fmt(px0)}" y1="{fmt(sy(v))}" '
                         f'y2="{fmt(sy(v))}" stroke="#000"/>')
            parts.append(f'<text x="{fmt(px0 - 6)}" y="{fmt(sy(v) + 4)}" text-anchor="end">'
                         f'{lab}</text>')
        xt = nice_ticks(xlo, xhi)
        for v, lab in zip(xt, tick_labels(xt)):
            parts.append(f'<line x1="{fmt(sx(v))}" x2="{fmt(sx(v))}" y1="{fmt(py1)}" '
                         f'y2="{fmt(py1 + 4)}" stroke="#000"/>')
            parts.append(f'<text x="{fmt(sx(v))}" y="{fmt(py1 + 16)}" text-anchor="middle">'
                         f'{lab}</text>')
        parts.append(f'<text x="{fmt((px0 + px1) / 2)}" y="{fmt(py1 + 32)}" '
                     f'text-anchor="middle">{escape(self.xlabel)}</text>')
        parts.append(f'<text transform="translate({fmt(x0 + 14)},{fmt((py0 + py1) / 2)}) '
                     f'rotate(-90)" text-anchor="middle">{escape(self.ylabel)}</text>')
        for v, lab in hl:
            parts.append(f'<line x1="{fmt(px0)}" x2="{fmt(px1)}" y1="{fmt(sy(v))}" '
                         f'y2="{fmt(sy(v))}" stroke="#555" stroke-dasharray="6,4"/>')
            parts.append(f'<text x="{fmt(px1 - 4)}" y="{fmt(sy(v) - 4)}" text-anchor="end" '
                         f'fill="#555">{escape(lab)}</text>')
        for k, (s, x, y) in enumerate(data):
            color = PALETTE[k % len(PALETTE)]
            if len(x) == 0:
                continue
            if s.markers:
                parts.extend(f'<circle cx="{fmt(sx(a))}" cy="{fmt(sy(b))}" r="1.5" '
                             f'fill="{color}"/>' for a, b in zip(x, y))
            else:
                pts = " ".join(f"{fmt(sx(a))},{fmt(sy(b))}" for a, b in zip(x, y))
                dash = ' stroke-dasharray="4,3"' if s.dashed else ""
                parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                             f'stroke-width="1"{dash}/>')
            ly = py0 + 14 + 14 * k
            parts.append(f'<rect x="{fmt(px0 + 8)}" y="{fmt(ly - 8)}" width="10" height="3" '
                         f'fill="{color}"/>')
            parts.append(f'<text x="{fmt(px0 + 22)}" y="{fmt(ly - 3)}">{escape(s.label)}</text>')
        parts.append("</g>")
        return "\n".join(parts)


def figure(panels: list[Panel], cols: int = 1) -> str:
    """Lay out panels on a grid inside a fixed 800x600 viewBox."""
    rows = math.ceil(len(panels) / cols)
    w, h = WIDTH / cols, HEIGHT / rows
    body = [p.render((k % cols) * w, (k // cols) * h, w, h) for k, p in enumerate(panels)]
    return (f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
            f'width="{WIDTH}" height="{HEIGHT}">\n'
            f'<rect width="100%" height="100%" fill="#fff"/>\n' + "\n".join(body) + "\n</svg>\n")
