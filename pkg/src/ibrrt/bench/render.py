"""Deterministic SVG rendering of planar runs."""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

from ..environment import Environment
from ..errors import UsageError
from ..geometry import Ball, Box
from ..tree import PathSolution

CANVAS = 600.0
TREE_STYLES = (
    'stroke="#1f77b4" stroke-width="0.8"',
    'stroke="#d62728" stroke-width="0.8" stroke-dasharray="3,2"',
)

Snapshot = Sequence[tuple[int, Sequence[float], int, float]]


def _fmt(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def render_2d(
    env: Environment,
    trees: Sequence[Snapshot] = (),
    sigma_f: PathSolution | None = None,
    iteration: int | None = None,
    cost: float | None = None,
) -> str:
    """SVG document showing obstacles, up to two trees (from ``Tree.snapshot``) and the best path."""
    if env.n != 2:
        raise UsageError(f"render_2d needs a 2-D environment, got n={env.n}")
    lo, ext = env.bounds.lo, env.bounds.extent
    scale = CANVAS / float(max(ext))
    w, h = float(ext[0]) * scale, float(ext[1]) * scale

    def px(p) -> tuple[str, str]:
        return _fmt((float(p[0]) - lo[0]) * scale), _fmt(h - (float(p[1]) - lo[1]) * scale)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(w)}" height="{_fmt(h)}" '
        f'viewBox="0 0 {_fmt(w)} {_fmt(h)}">',
        f'<rect class="bounds" x="0" y="0" width="{_fmt(w)}" height="{_fmt(h)}" fill="white" stroke="black"/>',
    ]
    for ob in env.obstacles:
        if isinstance(ob, Box):
            x0, y1 = px(ob.lo)
            x1, y0 = px(ob.hi)
            out.append(
                f'<rect class="obstacle" x="{x0}" y="{y0}" width="{_fmt(float(x1) - float(x0))}" '
                f'height="{_fmt(float(y1) - float(y0))}" fill="#555555"/>'
            )
        elif isinstance(ob, Ball):
            cx, cy = px(ob.center)
            out.append(f'<circle class="obstacle" cx="{cx}" cy="{cy}" r="{_fmt(ob.radius * scale)}" fill="#555555"/>')
    if trees or sigma_f is not None or iteration is not None:
        sx, sy = px(env.start)
        gx, gy = px(env.goal.center)
        out.append(f'<circle class="start" cx="{sx}" cy="{sy}" r="4" fill="#2ca02c"/>')
        out.append(
            f'<circle class="goal" cx="{gx}" cy="{gy}" r="{_fmt(max(env.goal.radius * scale, 3.0))}" '
            'fill="none" stroke="#ff7f0e" stroke-width="1.5"/>'
        )
    if len(trees) > len(TREE_STYLES):
        raise UsageError("at most two trees can be rendered")
    for k, snap in enumerate(trees):
        coords = {vid: xy for vid, xy, _, _ in snap}
        out.append(f'<g class="tree-{"ab"[k]}" fill="none" {TREE_STYLES[k]}>')
        for vid, xy, parent, _ in snap:
            if parent == vid:
                continue
            x0, y0 = px(coords[parent])
            x1, y1 = px(xy)
            out.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}"/>')
        out.append("</g>")
    if sigma_f is not None and len(sigma_f.states) > 1:
        pts = " ".join(",".join(px(p)) for p in sigma_f.states)
        out.append(f'<polyline class="solution" points="{pts}" fill="none" stroke="#ff7f0e" stroke-width="2.5"/>')
    notes = []
    if iteration is not None:
        notes.append(f"iteration {iteration}")
    if cost is not None and math.isfinite(cost):
        notes.append(f"cost {cost:.4f}")
    if notes:
        out.append(f'<text class="note" x="6" y="16" font-family="monospace" font-size="13">{escape(", ".join(notes))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
