"""Minimal standalone SVG charts: overlaid curves (ROC, PR) and labeled scatters."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
           "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939")
WIDTH, HEIGHT = 560, 420
LEFT, RIGHT, TOP, BOTTOM = 60, 170, 40, 50


class _Frame:
    def __init__(self, xlim, ylim):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        self.pw = WIDTH - LEFT - RIGHT
        self.ph = HEIGHT - TOP - BOTTOM

    def x(self, v):
        span = self.x1 - self.x0 or 1.0
        return LEFT + (np.asarray(v, dtype=float) - self.x0) / span * self.pw

    def y(self, v):
        span = self.y1 - self.y0 or 1.0
        return TOP + self.ph - (np.asarray(v, dtype=float) - self.y0) / span * self.ph


def _fmt(v: float) -> str:
    return f"{v:.4g}"


def _axes(frame: _Frame, title: str, xlabel: str, ylabel: str) -> list[str]:
    out = [f'<rect x="{LEFT}" y="{TOP}" width="{frame.pw}" height="{frame.ph}" '
           'fill="none" stroke="black"/>']
    for k in range(6):
        xv = frame.x0 + k * (frame.x1 - frame.x0) / 5
        yv = frame.y0 + k * (frame.y1 - frame.y0) / 5
        px, py = float(frame.x(xv)), float(frame.y(yv))
        out.append(f'<line x1="{px:.2f}" y1="{TOP + frame.ph}" x2="{px:.2f}" y2="{TOP + frame.ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.2f}" y="{TOP + frame.ph + 18}" font-size="11" text-anchor="middle">{_fmt(xv)}</text>')
        out.append(f'<line x1="{LEFT - 5}" y1="{py:.2f}" x2="{LEFT}" y2="{py:.2f}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{py + 4:.2f}" font-size="11" text-anchor="end">{_fmt(yv)}</text>')
    out.append(f'<text x="{LEFT + frame.pw / 2}" y="{TOP - 14}" font-size="14" text-anchor="middle">{escape(title)}</text>')
    out.append(f'<text x="{LEFT + frame.pw / 2}" y="{HEIGHT - 12}" font-size="12" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{TOP + frame.ph / 2}" font-size="12" text-anchor="middle" '
               f'transform="rotate(-90 16 {TOP + frame.ph / 2})">{escape(ylabel)}</text>')
    return out


def _legend(names: list[str], colors: list[str]) -> list[str]:
    out = []
    x = WIDTH - RIGHT + 12
    for i, (name, color) in enumerate(zip(names, colors)):
        y = TOP + 10 + 18 * i
        out.append(f'<line x1="{x}" y1="{y}" x2="{x + 20}" y2="{y}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{x + 26}" y="{y + 4}" font-size="11">{escape(name)}</text>')
    return out


def _document(body: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">')
    return "\n".join([head, f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>', *body, "</svg>"]) + "\n"


def curves_svg(series: dict[str, np.ndarray], title: str, xlabel: str, ylabel: str,
               step: bool = False) -> str:
    """Overlay of 2-column point arrays on the unit square, one legend entry per name."""
    frame = _Frame((0.0, 1.0), (0.0, 1.0))
    body = _axes(frame, title, xlabel, ylabel)
    colors = [PALETTE[i % len(PALETTE)] for i in range(len(series))]
    for (name, pts), color in zip(series.items(), colors):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if step and len(pts) > 1:
            # hold each precision value back to the previous recall
            xs = np.repeat(pts[:, 0], 2)[1:]
            ys = np.repeat(pts[:, 1], 2)[:-1]
            pts = np.column_stack([xs, ys])
        coords = " ".join(f"{float(a):.2f},{float(b):.2f}" for a, b in zip(frame.x(pts[:, 0]), frame.y(pts[:, 1])))
        body.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}">'
                    f'<title>{escape(name)}</title></polyline>')
    body += _legend(list(series), colors)
    return _document(body)


def scatter_svg(points, labels=None, title: str = "", xlabel: str = "x", ylabel: str = "y") -> str:
    """Scatter of 2-D points; label +1 drawn red, others black."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    lo = pts.min(axis=0) if pts.size else np.zeros(2)
    hi = pts.max(axis=0) if pts.size else np.ones(2)
    pad = np.where(hi > lo, 0.05 * (hi - lo), 0.5)
    frame = _Frame((lo[0] - pad[0], hi[0] + pad[0]), (lo[1] - pad[1], hi[1] + pad[1]))
    body = _axes(frame, title, xlabel, ylabel)
    lab = np.full(len(pts), -1) if labels is None else np.asarray(labels)
    # anomalies last so they stay visible
    for i in np.r_[np.flatnonzero(lab != 1), np.flatnonzero(lab == 1)]:
        color = "#d62728" if lab[i] == 1 else "black"
        body.append(f'<circle cx="{float(frame.x(pts[i, 0])):.2f}" cy="{float(frame.y(pts[i, 1])):.2f}" '
                    f'r="2.5" fill="{color}"/>')
    body += _legend(["normal", "anomaly"], ["black", "#d62728"])
    return _document(body)
