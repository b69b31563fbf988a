"""Deterministic SVG snapshot of the aligned overview (no browser needed)."""

from __future__ import annotations

from .joint import JointGraph
from .layout import LayoutResult

_SIDE_COLOR = {"a": "#4878a8", "b": "#c47a3d"}


def _fmt(value: float) -> str:
    return f"{value:.4f}"


def render_overview_svg(
    joint: JointGraph,
    layout: LayoutResult,
    bubbles: list[dict],
    node_radius: float = 0.05,
    size: int = 960,
) -> str:
    """Nodes, intra edges, and bubble polygons of the separated layout."""
    xs, ys = [], []
    for x, y in layout.positions.values():
        xs.append(x)
        ys.append(y)
    for bubble in bubbles:
        for x, y in bubble.get("polygon", ()):
            xs.append(x)
            ys.append(y)
    if not xs:
        return '<svg xmlns="http://www.w3.org/2000/svg" width="1" height="1"/>'
    pad = 4 * node_radius
    min_x, max_x = min(xs) - pad, max(xs) + pad
    min_y, max_y = min(ys) - pad, max(ys) + pad
    width = max_x - min_x
    height = max_y - min_y
    scale = size / max(width, height)

    def sx(x: float) -> str:
        return _fmt((x - min_x) * scale)

    def sy(y: float) -> str:
        return _fmt((max_y - y) * scale)  # flip so +y points up

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width * scale)}" '
        f'height="{_fmt(height * scale)}" style="background:#ffffff">'
    ]
    for bubble in bubbles:
        polygon = bubble.get("polygon")
        if not polygon:
            continue
        points = " ".join(f"{sx(x)},{sy(y)}" for x, y in polygon)
        opacity = 0.15 + 0.55 * float(bubble.get("content_jaccard", 0.0))
        parts.append(
            f'<polygon points="{points}" fill="#888888" fill-opacity="{_fmt(opacity)}" '
            f'stroke="#555555" stroke-width="1"/>'
        )
    for side, graph in (("a", joint.graph_a), ("b", joint.graph_b)):
        positions = layout.side_positions(side)
        for u, v, _ in graph.edges:
            (x1, y1), (x2, y2) = positions[u], positions[v]
            parts.append(
                f'<line x1="{sx(x1)}" y1="{sy(y1)}" x2="{sx(x2)}" y2="{sy(y2)}" '
                f'stroke="#999999" stroke-width="1"/>'
            )
        radius = _fmt(node_radius * scale)
        for nid in sorted(positions):
            x, y = positions[nid]
            parts.append(
                f'<circle cx="{sx(x)}" cy="{sy(y)}" r="{radius}" fill="{_SIDE_COLOR[side]}" '
                f'stroke="#333333" stroke-width="0.5"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
