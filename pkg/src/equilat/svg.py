"""SVG pictures of planar unit balls and point configurations."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .norms import NormSpec

N_ANGLES = 720
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def ball_boundary(spec: NormSpec, n_angles: int = N_ANGLES) -> np.ndarray:
    """Unit sphere points ``u / ||u||`` at equally spaced angles."""
    theta = 2.0 * np.pi * np.arange(n_angles) / n_angles
    u = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    return u / np.asarray(spec.evaluate(u), dtype=float)[:, None]


def render(balls, points=None, size: int = 480, title: str | None = None) -> str:
    """SVG 1.1 document.

    Parameters
    ----------
    balls : list of (label, NormSpec)
    points : array of shape (k, 2), optional
    """
    curves = [(label, ball_boundary(spec)) for label, spec in balls]
    pts = np.zeros((0, 2)) if points is None else np.asarray(points, dtype=float).reshape(-1, 2)
    extent = max([np.abs(c).max() for _, c in curves] + [np.abs(pts).max(initial=0.0), 1e-9]) * 1.1
    scale = size / (2.0 * extent)

    def xy(p):
        return size / 2.0 + p[0] * scale, size / 2.0 - p[1] * scale

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size + 24 * len(curves)}" '
        f'viewBox="0 0 {size} {size + 24 * len(curves)}">',
    ]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    out.append(f'<rect x="0" y="0" width="{size}" height="{size}" fill="white" stroke="#cccccc"/>')
    c = size / 2.0
    out.append(f'<line x1="0" y1="{c}" x2="{size}" y2="{c}" stroke="#eeeeee"/>')
    out.append(f'<line x1="{c}" y1="0" x2="{c}" y2="{size}" stroke="#eeeeee"/>')
    for k, (label, curve) in enumerate(curves):
        color = _COLORS[k % len(_COLORS)]
        path = " ".join(f"{x:.3f},{y:.3f}" for x, y in map(xy, curve))
        out.append(f'<polygon points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = size + 16 + 24 * k
        out.append(f'<line x1="10" y1="{ly - 4}" x2="34" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="40" y="{ly}" font-family="sans-serif" font-size="13">{escape(label)}</text>')
    for i, p in enumerate(pts):
        x, y = xy(p)
        out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="4" fill="black"/>')
        out.append(f'<text x="{x + 6:.3f}" y="{y - 6:.3f}" font-family="sans-serif" font-size="12">{i}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
