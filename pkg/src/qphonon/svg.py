"""Small self-contained SVG plots: line charts (optionally log-y with bands) and bars."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")
WIDTH, HEIGHT = 640, 420
MARGIN = {"left": 80, "right": 150, "top": 40, "bottom": 60}


@dataclass
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float]
    band: Sequence[float] | None = None  # symmetric half-width per point


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


class _Frame:
    def __init__(self, xs: Sequence[float], ys: Sequence[float], log_y: bool):
        self.log_y = log_y
        tf = [self._ty(v) for v in ys]
        self.x0, self.x1 = min(xs), max(xs)
        self.y0, self.y1 = min(tf), max(tf)
        if self.x1 == self.x0:
            self.x1 = self.x0 + 1
        if self.y1 == self.y0:
            self.y1 = self.y0 + 1
        pad = 0.05 * (self.y1 - self.y0)
        self.y0 -= pad
        self.y1 += pad

    def _ty(self, v: float) -> float:
        return math.log10(v) if self.log_y else v

    def px(self, x: float) -> float:
        span = WIDTH - MARGIN["left"] - MARGIN["right"]
        return MARGIN["left"] + (x - self.x0) / (self.x1 - self.x0) * span

    def py(self, y: float) -> float:
        span = HEIGHT - MARGIN["top"] - MARGIN["bottom"]
        return HEIGHT - MARGIN["bottom"] - (self._ty(y) - self.y0) / (self.y1 - self.y0) * span


def _header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="24" text-anchor="middle" font-size="15" font-family="sans-serif">{escape(title)}</text>',
    ]


def _axes(frame: _Frame, xlabel: str, ylabel: str) -> list[str]:
    left, bottom = MARGIN["left"], HEIGHT - MARGIN["bottom"]
    right, top = WIDTH - MARGIN["right"], MARGIN["top"]
    out = [
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{bottom}" x2="{left}" y2="{top}" stroke="black"/>',
        f'<text x="{(left + right) / 2:.1f}" y="{HEIGHT - 18}" text-anchor="middle" font-size="12" font-family="sans-serif">{escape(xlabel)}</text>',
        f'<text x="18" y="{(top + bottom) / 2:.1f}" text-anchor="middle" font-size="12" font-family="sans-serif" '
        f'transform="rotate(-90 18 {(top + bottom) / 2:.1f})">{escape(ylabel)}</text>',
    ]
    for x in _ticks(frame.x0, frame.x1):
        out.append(f'<text x="{frame.px(x):.1f}" y="{bottom + 16}" text-anchor="middle" font-size="10" font-family="sans-serif">{x:.4g}</text>')
    for t in _ticks(frame.y0, frame.y1):
        value = 10**t if frame.log_y else t
        y = HEIGHT - MARGIN["bottom"] - (t - frame.y0) / (frame.y1 - frame.y0) * (bottom - top)
        out.append(f'<text x="{left - 6}" y="{y + 3:.1f}" text-anchor="end" font-size="10" font-family="sans-serif">{value:.3g}</text>')
    return out


def line_plot(
    series: Sequence[Series],
    title: str,
    xlabel: str,
    ylabel: str,
    log_y: bool = False,
) -> str:
    if not series:
        raise ValueError("nothing to plot")
    xs = [x for s in series for x in s.x]
    ys = []
    for s in series:
        for i, y in enumerate(s.y):
            half = s.band[i] if s.band is not None else 0.0
            ys.extend([y + half, max(y - half, y * 1e-3) if log_y else y - half])
    if log_y and min(ys) <= 0:
        raise ValueError("log-scale plot needs positive values")
    frame = _Frame(xs, ys, log_y)
    out = _header(title) + _axes(frame, xlabel, ylabel)
    for k, s in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        if s.band is not None and any(s.band):
            upper = [(frame.px(x), frame.py(y + h)) for x, y, h in zip(s.x, s.y, s.band)]
            lower = [(frame.px(x), frame.py(max(y - h, y * 1e-3) if log_y else y - h)) for x, y, h in zip(s.x, s.y, s.band)]
            pts = " ".join(f"{a:.1f},{b:.1f}" for a, b in upper + lower[::-1])
            out.append(f'<polygon class="band" points="{pts}" fill="{color}" fill-opacity="0.2" stroke="none"/>')
        pts = " ".join(f"{frame.px(x):.1f},{frame.py(y):.1f}" for x, y in zip(s.x, s.y))
        out.append(f'<polyline class="series" points="{pts}" fill="none" stroke="{color}" stroke-width="1.8"/>')
        ly = MARGIN["top"] + 16 * k + 8
        lx = WIDTH - MARGIN["right"] + 10
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 18}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 22}" y="{ly + 4}" font-size="11" font-family="sans-serif">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def bar_chart(labels: Sequence[str], values: Sequence[float], errors: Sequence[float], title: str, ylabel: str) -> str:
    if len(labels) != len(values) or len(values) != len(errors):
        raise ValueError("labels, values and errors must have equal length")
    top_value = max(v + e for v, e in zip(values, errors)) or 1.0
    left, bottom = MARGIN["left"], HEIGHT - MARGIN["bottom"]
    right, top = WIDTH - MARGIN["right"], MARGIN["top"]
    slot = (right - left) / max(len(values), 1)
    out = _header(title)
    out.append(f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>')
    out.append(f'<line x1="{left}" y1="{bottom}" x2="{left}" y2="{top}" stroke="black"/>')
    out.append(
        f'<text x="18" y="{(top + bottom) / 2:.1f}" text-anchor="middle" font-size="12" font-family="sans-serif" '
        f'transform="rotate(-90 18 {(top + bottom) / 2:.1f})">{escape(ylabel)}</text>'
    )
    scale = (bottom - top) / (1.05 * top_value)
    for i, (lab, v, e) in enumerate(zip(labels, values, errors)):
        x = left + i * slot + 0.15 * slot
        h = max(v, 0.0) * scale
        color = PALETTE[i % len(PALETTE)]
        out.append(f'<rect class="bar" x="{x:.1f}" y="{bottom - h:.1f}" width="{0.7 * slot:.1f}" height="{h:.1f}" fill="{color}"/>')
        cx = x + 0.35 * slot
        out.append(
            f'<line x1="{cx:.1f}" y1="{bottom - (v + e) * scale:.1f}" x2="{cx:.1f}" y2="{bottom - max(v - e, 0) * scale:.1f}" stroke="black"/>'
        )
        out.append(f'<text x="{cx:.1f}" y="{bottom + 16}" text-anchor="middle" font-size="11" font-family="sans-serif">{escape(lab)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
