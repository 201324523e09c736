"""Minimal deterministic SVG line charts."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import numpy as np

WIDTH = 960
HEIGHT = 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 40, 50
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
MAX_POINTS = 1600


def _decimate(x: np.ndarray, y: np.ndarray, n: int = MAX_POINTS) -> tuple[np.ndarray, np.ndarray]:
    """Keep the min and max of each bucket so oscillation extremes survive."""
    if x.size <= n:
        return x, y
    buckets = np.array_split(np.arange(x.size), n // 2)
    idx = []
    for b in buckets:
        lo, hi = b[np.argmin(y[b])], b[np.argmax(y[b])]
        idx.extend(sorted((lo, hi)))
    idx = np.array(idx)
    return x[idx], y[idx]


def _nice_range(lo: float, hi: float) -> tuple[float, float]:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return -1.0, 1.0
    if hi - lo <= 1e-300 * max(1.0, abs(hi)) or hi == lo:
        c = lo
        pad = max(abs(c) * 0.1, 1.0)
        return c - pad, c + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick(v: float) -> str:
    return f"{v:.4g}"


def line_chart(path, title: str, series: Sequence[tuple[str, np.ndarray, np.ndarray]],
               xlabel: str = "t") -> Path:
    """Write an SVG 1.1 chart of the given (label, x, y) series."""
    clean = []
    for label, x, y in series:
        x = np.asarray(x, dtype=float)
        y = np.nan_to_num(np.asarray(y, dtype=float), nan=0.0, posinf=0.0, neginf=0.0)
        clean.append((label, *_decimate(x, y)))
    xs = np.concatenate([c[1] for c in clean])
    ys = np.concatenate([c[2] for c in clean])
    x0, x1 = (float(xs.min()), float(xs.max())) if xs.size else (0.0, 1.0)
    if x1 <= x0:
        x1 = x0 + 1.0
    y0, y1 = _nice_range(float(ys.min()), float(ys.max())) if ys.size else (-1.0, 1.0)
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def px(v):
        return MARGIN_L + (v - x0) / (x1 - x0) * pw

    def py(v):
        return MARGIN_T + (y1 - v) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{_escape(title)}</text>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
    ]
    for k in range(5):
        fx = x0 + (x1 - x0) * k / 4
        fy = y0 + (y1 - y0) * k / 4
        out.append(f'<text x="{_fmt(px(fx))}" y="{HEIGHT - MARGIN_B + 18}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{_tick(fx)}</text>')
        out.append(f'<text x="{MARGIN_L - 6}" y="{_fmt(py(fy) + 4)}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{_tick(fy)}</text>')
    out.append(f'<text x="{MARGIN_L + pw // 2}" y="{HEIGHT - 12}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12">{_escape(xlabel)}</text>')
    if y0 < 0 < y1:
        out.append(f'<line x1="{MARGIN_L}" y1="{_fmt(py(0))}" x2="{MARGIN_L + pw}" '
                   f'y2="{_fmt(py(0))}" stroke="#bbb" stroke-width="1"/>')
    for k, (label, x, y) in enumerate(clean):
        color = COLORS[k % len(COLORS)]
        if x.size:
            pts = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(x, y))
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1" points="{pts}"/>')
        ly = MARGIN_T + 16 + 16 * k
        out.append(f'<line x1="{MARGIN_L + 10}" y1="{ly - 4}" x2="{MARGIN_L + 30}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{MARGIN_L + 36}" y="{ly}" font-family="sans-serif" '
                   f'font-size="12">{_escape(label)}</text>')
    out.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(out) + "\n", encoding="utf-8")
    return path


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
