"""Minimal deterministic SVG line plots for trajectories and residuals.

Hand-rolled so that identical data produce byte-identical files; no styling
beyond a fixed palette and axis box.
"""

from __future__ import annotations

import numpy as np

__all__ = ["svg_line_plot"]

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_W, _H, _PAD = 640, 400, 48


def _fmt(v: float) -> str:
    return "%.6g" % v


def svg_line_plot(path: str, xs: np.ndarray, series: dict[str, np.ndarray], title: str) -> None:
    xs = np.asarray(xs, dtype=float)
    if not series:
        raise ValueError("need at least one series")
    ys_all = np.concatenate([np.asarray(y, dtype=float) for y in series.values()])
    x_lo, x_hi = float(np.min(xs)), float(np.max(xs))
    y_lo, y_hi = float(np.min(ys_all)), float(np.max(ys_all))
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def px(x: float) -> float:
        return _PAD + (x - x_lo) / (x_hi - x_lo) * (_W - 2 * _PAD)

    def py(y: float) -> float:
        return _H - _PAD - (y - y_lo) / (y_hi - y_lo) * (_H - 2 * _PAD)

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_PAD}" y="{_PAD}" width="{_W - 2 * _PAD}" height="{_H - 2 * _PAD}" '
        'fill="none" stroke="#444444" stroke-width="1"/>',
        f'<text x="{_W // 2}" y="24" text-anchor="middle" font-family="monospace" '
        f'font-size="14">{title}</text>',
        f'<text x="{_PAD}" y="{_H - 12}" font-family="monospace" font-size="11">'
        f"x: [{_fmt(x_lo)}, {_fmt(x_hi)}]  y: [{_fmt(y_lo)}, {_fmt(y_hi)}]</text>",
    ]
    for idx, (name, ys) in enumerate(series.items()):
        ys = np.asarray(ys, dtype=float)
        pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(xs, ys))
        color = _PALETTE[idx % len(_PALETTE)]
        lines.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        lines.append(
            f'<text x="{_W - _PAD}" y="{_PAD + 14 * (idx + 1)}" text-anchor="end" '
            f'font-family="monospace" font-size="11" fill="{color}">{name}</text>'
        )
    lines.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
