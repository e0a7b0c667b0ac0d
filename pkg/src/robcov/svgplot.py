"""Minimal deterministic SVG charts for the CLI.

No plotting dependency: each chart is assembled from a fixed 800x600
template with coordinates printed to six decimal places, so identical
inputs produce byte-identical files suitable for golden-file tests.
Every number shown in a chart is also available in the CSV/JSON outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

WIDTH = 800
HEIGHT = 600
MARGIN_LEFT = 70
MARGIN_RIGHT = 25
MARGIN_TOP = 30
MARGIN_BOTTOM = 55


def _fmt(v: float) -> str:
    return f"{v:.6f}"


@dataclass
class _Frame:
    """Linear map from data coordinates to the SVG plot rectangle."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self) -> None:
        if self.xmax <= self.xmin:
            self.xmax = self.xmin + 1.0
        if self.ymax <= self.ymin:
            self.ymax = self.ymin + 1.0

    def x(self, v: float) -> float:
        frac = (v - self.xmin) / (self.xmax - self.xmin)
        return MARGIN_LEFT + frac * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)

    def y(self, v: float) -> float:
        frac = (v - self.ymin) / (self.ymax - self.ymin)
        return HEIGHT - MARGIN_BOTTOM - frac * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)


def _padded_frame(xs: np.ndarray, ys: np.ndarray, pad: float = 0.06) -> _Frame:
    xmin, xmax = float(np.min(xs)), float(np.max(xs))
    ymin, ymax = float(np.min(ys)), float(np.max(ys))
    dx = (xmax - xmin) or 1.0
    dy = (ymax - ymin) or 1.0
    return _Frame(xmin - pad * dx, xmax + pad * dx, ymin - pad * dy, ymax + pad * dy)


def _document(body: list[str], title: str) -> str:
    head = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}">',
        f'<title>{title}</title>',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    return "\n".join(head + body + ["</svg>"]) + "\n"


def _axes(frame: _Frame, xlabel: str, ylabel: str) -> list[str]:
    x0, x1 = MARGIN_LEFT, WIDTH - MARGIN_RIGHT
    y0, y1 = HEIGHT - MARGIN_BOTTOM, MARGIN_TOP
    parts = [
        f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" '
        'fill="none" stroke="#333333" stroke-width="1"/>',
    ]
    for v, px in ((frame.xmin, x0), (frame.xmax, x1)):
        parts.append(
            f'<text x="{_fmt(px)}" y="{y0 + 18}" font-size="11" '
            f'text-anchor="middle" fill="#333333">{v:.6g}</text>'
        )
    for v, py in ((frame.ymin, y0), (frame.ymax, y1)):
        parts.append(
            f'<text x="{x0 - 8}" y="{_fmt(py + 4)}" font-size="11" '
            f'text-anchor="end" fill="#333333">{v:.6g}</text>'
        )
    parts.append(
        f'<text x="{(x0 + x1) / 2}" y="{HEIGHT - 12}" font-size="13" '
        f'text-anchor="middle" fill="#000000">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{(y0 + y1) / 2}" font-size="13" text-anchor="middle" '
        f'fill="#000000" transform="rotate(-90 16 {(y0 + y1) / 2})">{ylabel}</text>'
    )
    return parts


def _polyline(frame: _Frame, pts: np.ndarray, stroke: str, dashed: bool) -> str:
    coords = " ".join(
        f"{_fmt(frame.x(px))},{_fmt(frame.y(py))}" for px, py in pts
    )
    dash = ' stroke-dasharray="6,4"' if dashed else ""
    return (
        f'<polyline points="{coords}" fill="none" stroke="{stroke}" '
        f'stroke-width="1.5"{dash}/>'
    )


def youden_svg(
    points: np.ndarray,
    row_ids: tuple[str, ...],
    ellipses: list[tuple[float, np.ndarray]],
    centroid: tuple[float, float],
    label_ids: tuple[str, ...],
    xlabel: str,
    ylabel: str,
) -> str:
    """Scatter of laboratory means with coverage ellipses.

    ``ellipses`` holds (coverage, closed polygon) pairs; the outermost is
    drawn solid, inner ones dashed. Crosshair lines run through the
    centroid; laboratories listed in ``label_ids`` are annotated.
    """
    all_x = np.concatenate([points[:, 0]] + [e[:, 0] for _, e in ellipses])
    all_y = np.concatenate([points[:, 1]] + [e[:, 1] for _, e in ellipses])
    frame = _padded_frame(all_x, all_y)
    body = _axes(frame, xlabel, ylabel)
    cx, cy = centroid
    body.append(
        f'<line x1="{_fmt(frame.x(cx))}" y1="{MARGIN_TOP}" '
        f'x2="{_fmt(frame.x(cx))}" y2="{HEIGHT - MARGIN_BOTTOM}" '
        'stroke="#999999" stroke-width="0.8"/>'
    )
    body.append(
        f'<line x1="{MARGIN_LEFT}" y1="{_fmt(frame.y(cy))}" '
        f'x2="{WIDTH - MARGIN_RIGHT}" y2="{_fmt(frame.y(cy))}" '
        'stroke="#999999" stroke-width="0.8"/>'
    )
    outermost = max(c for c, _ in ellipses) if ellipses else None
    for coverage, poly in ellipses:
        body.append(
            _polyline(frame, poly, "#1f5fbf", dashed=coverage != outermost)
        )
    labelled = set(label_ids)
    for rid, (px, py) in zip(row_ids, points):
        sx, sy = frame.x(px), frame.y(py)
        body.append(
            f'<circle cx="{_fmt(sx)}" cy="{_fmt(sy)}" r="3.5" '
            'fill="#c44545" stroke="#7a2020" stroke-width="0.8"/>'
        )
        if rid in labelled:
            body.append(
                f'<text x="{_fmt(sx + 6)}" y="{_fmt(sy - 6)}" font-size="11" '
                f'fill="#000000">{rid}</text>'
            )
    return _document(body, "Youden plot with data ellipses")


def distance_svg(
    row_ids: tuple[str, ...],
    distances: tuple[float, ...],
    crit95: float,
    crit99: float,
    xlabel: str = "squared Mahalanobis distance",
) -> str:
    """Dot chart of per-laboratory squared distances with critical lines."""
    n = len(row_ids)
    xmax = max(list(distances) + [crit99]) * 1.08
    frame = _Frame(0.0, xmax, -0.5, n - 0.5)
    body = _axes(frame, xlabel, "laboratory")
    for crit, dashed in ((crit95, True), (crit99, False)):
        px = frame.x(crit)
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        body.append(
            f'<line x1="{_fmt(px)}" y1="{MARGIN_TOP}" x2="{_fmt(px)}" '
            f'y2="{HEIGHT - MARGIN_BOTTOM}" stroke="#444444" '
            f'stroke-width="1.2"{dash}/>'
        )
    for i, (rid, d) in enumerate(zip(row_ids, distances)):
        py = frame.y(n - 1 - i)
        body.append(
            f'<line x1="{MARGIN_LEFT}" y1="{_fmt(py)}" x2="{_fmt(frame.x(d))}" '
            f'y2="{_fmt(py)}" stroke="#dddddd" stroke-width="1"/>'
        )
        body.append(
            f'<circle cx="{_fmt(frame.x(d))}" cy="{_fmt(py)}" r="3" '
            'fill="#1f5fbf"/>'
        )
        body.append(
            f'<text x="{MARGIN_LEFT - 6}" y="{_fmt(py + 3)}" font-size="8" '
            f'text-anchor="end" fill="#333333">{rid}</text>'
        )
    return _document(body, "Mahalanobis distance screen")


def biplot_svg(
    points: np.ndarray,
    row_ids: tuple[str, ...],
    arrows: np.ndarray,
    var_ids: tuple[str, ...],
    label_ids: tuple[str, ...],
    xlabel: str = "PC1",
    ylabel: str = "PC2",
) -> str:
    """PC-plane biplot: laboratory scores plus variable arrows."""
    # arrows get their own scale so they stay visible next to the scores
    pt_span = float(np.max(np.abs(points))) or 1.0
    ar_span = float(np.max(np.abs(arrows))) or 1.0
    arrow_gain = 0.45 * pt_span / ar_span
    scaled = arrows * arrow_gain
    all_x = np.concatenate([points[:, 0], scaled[:, 0], [0.0]])
    all_y = np.concatenate([points[:, 1], scaled[:, 1], [0.0]])
    frame = _padded_frame(all_x, all_y)
    body = _axes(frame, xlabel, ylabel)
    ox, oy = frame.x(0.0), frame.y(0.0)
    body.append(
        f'<line x1="{_fmt(ox)}" y1="{MARGIN_TOP}" x2="{_fmt(ox)}" '
        f'y2="{HEIGHT - MARGIN_BOTTOM}" stroke="#cccccc" stroke-width="0.8"/>'
    )
    body.append(
        f'<line x1="{MARGIN_LEFT}" y1="{_fmt(oy)}" x2="{WIDTH - MARGIN_RIGHT}" '
        f'y2="{_fmt(oy)}" stroke="#cccccc" stroke-width="0.8"/>'
    )
    for (ax, ay), vid in zip(scaled, var_ids):
        tip_x, tip_y = frame.x(ax), frame.y(ay)
        body.append(
            f'<line x1="{_fmt(ox)}" y1="{_fmt(oy)}" x2="{_fmt(tip_x)}" '
            f'y2="{_fmt(tip_y)}" stroke="#2a7a2a" stroke-width="1.4"/>'
        )
        body.append(
            f'<text x="{_fmt(tip_x + 4)}" y="{_fmt(tip_y - 4)}" font-size="10" '
            f'fill="#2a7a2a">{vid}</text>'
        )
    labelled = set(label_ids)
    for rid, (px, py) in zip(row_ids, points):
        sx, sy = frame.x(px), frame.y(py)
        body.append(
            f'<circle cx="{_fmt(sx)}" cy="{_fmt(sy)}" r="3" fill="#1f1f1f"/>'
        )
        if rid in labelled:
            body.append(
                f'<text x="{_fmt(sx + 5)}" y="{_fmt(sy - 5)}" font-size="11" '
                f'fill="#000000">{rid}</text>'
            )
    return _document(body, "Principal component biplot")
