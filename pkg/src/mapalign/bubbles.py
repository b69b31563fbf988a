"""Bubble contour polygons enclosing an alignment pair's nodes in a layout.

A scalar potential field is accumulated on a uniform grid: each member node
adds a radially decreasing bump, each non-member node subtracts one, and
virtual edges along the members' minimum spanning tree keep the region
connected. The polygon is the 0.5 iso-contour of the field. The scores the
UI maps to opacity and boundary waviness ride along with the geometry.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.sparse.csgraph import minimum_spanning_tree
from skimage import measure

from .errors import InvalidParameterError

MEMBER_RADIUS_FACTOR = 4.0  # R1 = 4 * node radius
OBSTACLE_RADIUS_FACTOR = 2.0  # R0 = 2 * node radius
THRESHOLD = 0.5


@dataclass(frozen=True)
class BubbleGeometry:
    pair_id: int
    side: str
    polygon: tuple[tuple[float, float], ...]
    content_jaccard: float
    coherence: float

    def to_json(self) -> dict:
        return {
            "pair_id": self.pair_id,
            "side": self.side,
            "polygon": [[x, y] for x, y in self.polygon],
            "content_jaccard": self.content_jaccard,
            "coherence": self.coherence,
        }


def _segment_point_distance(points: np.ndarray, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Distance from each point to segment pq, vectorized over points."""
    pq = q - p
    denom = float(pq @ pq)
    if denom < 1e-18:
        return np.linalg.norm(points - p, axis=-1)
    t = np.clip(((points - p) @ pq) / denom, 0.0, 1.0)
    closest = p + t[..., None] * pq
    return np.linalg.norm(points - closest, axis=-1)


def _mst_segments(members: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    m = members.shape[0]
    if m < 2:
        return []
    diff = members[:, None, :] - members[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    tree = minimum_spanning_tree(dist).tocoo()
    return [(members[i], members[j]) for i, j in zip(tree.row, tree.col)]


def _reroute(p: np.ndarray, q: np.ndarray, obstacles: np.ndarray, clearances: np.ndarray, depth: int):
    """Split a virtual edge around the obstacle it passes closest to."""
    if depth <= 0 or obstacles.shape[0] == 0:
        return [(p, q)]
    dists = _segment_point_distance(obstacles, p, q)
    blocking = np.flatnonzero(dists < clearances)
    if blocking.size == 0:
        return [(p, q)]
    worst = int(blocking[np.argmin(dists[blocking])])
    obstacle = obstacles[worst]
    seg = q - p
    seg_norm = float(np.linalg.norm(seg))
    if seg_norm < 1e-12:
        return [(p, q)]
    t = float(np.clip(((obstacle - p) @ seg) / (seg_norm**2), 0.0, 1.0))
    foot = p + t * seg
    away = foot - obstacle
    if float(np.linalg.norm(away)) < 1e-9:
        away = np.array([-seg[1], seg[0]]) / seg_norm  # obstacle on the segment: detour left
    else:
        away = away / float(np.linalg.norm(away))
    detour = obstacle + away * (clearances[worst] * 1.5)
    return _reroute(p, detour, obstacles, clearances, depth - 1) + _reroute(detour, q, obstacles, clearances, depth - 1)


def bubble_contour(
    member_positions: np.ndarray,
    obstacle_positions: np.ndarray,
    node_radii: "float | np.ndarray",
    grid_cell: float,
    threshold: float = THRESHOLD,
) -> np.ndarray:
    """Iso-contour polygon of the member/obstacle potential field.

    Members add ((1 - d/R1))^2 inside R1 = 4r, obstacles subtract the same
    form inside R0 = 2r, and the members' spanning tree contributes edge
    potentials (rerouted around obstacles) so the level set stays connected.
    Obstacles still caught inside the contour get their negative influence
    doubled and the field is recomputed, as in the original technique.
    Returns a closed (first == last) polygon as an (n, 2) array.
    """
    members = np.atleast_2d(np.asarray(member_positions, dtype=np.float64))
    obstacles = np.atleast_2d(np.asarray(obstacle_positions, dtype=np.float64)) if len(obstacle_positions) else np.zeros((0, 2))
    if members.shape[0] == 0:
        raise InvalidParameterError("need at least one member position")
    if grid_cell <= 0:
        raise InvalidParameterError("grid_cell must be positive")
    radii = np.asarray(node_radii, dtype=np.float64)
    if radii.ndim == 0:
        radii = np.full(members.shape[0] + obstacles.shape[0], float(radii))
    if radii.shape[0] != members.shape[0] + obstacles.shape[0]:
        raise InvalidParameterError("node_radii must be scalar or one radius per member then obstacle")
    r1 = MEMBER_RADIUS_FACTOR * radii[: members.shape[0]]
    r0 = OBSTACLE_RADIUS_FACTOR * radii[members.shape[0]:]

    pad = float(r1.max()) + 2 * grid_cell
    x0, y0 = members.min(axis=0) - pad
    x1, y1 = members.max(axis=0) + pad
    xs = np.arange(x0, x1 + grid_cell, grid_cell)
    ys = np.arange(y0, y1 + grid_cell, grid_cell)
    grid = np.stack(np.meshgrid(xs, ys), axis=-1)  # (ny, nx, 2)

    base = np.zeros(grid.shape[:2])
    for i in range(members.shape[0]):
        d = np.linalg.norm(grid - members[i], axis=-1)
        base += np.where(d < r1[i], (1.0 - d / r1[i]) ** 2, 0.0)
    edge_r1 = float(r1.mean())
    for p, q in _mst_segments(members):
        for a, b in _reroute(p, q, obstacles, r0, depth=4):
            d = _segment_point_distance(grid, a, b)
            base += np.where(d < edge_r1, (1.0 - d / edge_r1) ** 2, 0.0)
    obstacle_fields = []
    for i in range(obstacles.shape[0]):
        d = np.linalg.norm(grid - obstacles[i], axis=-1)
        obstacle_fields.append(np.where(d < r0[i], (1.0 - d / r0[i]) ** 2, 0.0))

    obstacle_scale = np.ones(obstacles.shape[0])
    polygon = None
    for _ in range(9):
        field = base.copy()
        for i, obstacle_field in enumerate(obstacle_fields):
            field -= obstacle_scale[i] * obstacle_field
        contours = measure.find_contours(field, threshold)
        if not contours:
            raise InvalidParameterError("no iso-contour found; grid too coarse for the given radii")
        best, best_area = None, -1.0
        for contour in contours:
            area = abs(_shoelace(contour))
            if area > best_area:
                best, best_area = contour, area
        polygon = np.column_stack([x0 + best[:, 1] * grid_cell, y0 + best[:, 0] * grid_cell])
        if not np.allclose(polygon[0], polygon[-1]):
            polygon = np.vstack([polygon, polygon[0]])
        if not obstacles.shape[0]:
            break
        trapped = np.flatnonzero(
            _points_in_ring(obstacles, polygon) | (_ring_distances(obstacles, polygon) < grid_cell)
        )
        if not trapped.size:
            break
        obstacle_scale[trapped] *= 2.0
    return polygon


def _ring_distances(points: np.ndarray, ring: np.ndarray) -> np.ndarray:
    """Min distance from each point to any ring segment, fully vectorized."""
    p = ring[:-1]
    q = ring[1:]
    pq = q - p
    denom = np.maximum(np.einsum("sj,sj->s", pq, pq), 1e-18)
    diff = points[:, None, :] - p[None, :, :]
    t = np.clip(np.einsum("nsj,sj->ns", diff, pq) / denom, 0.0, 1.0)
    closest = p[None, :, :] + t[..., None] * pq[None, :, :]
    return np.sqrt(((points[:, None, :] - closest) ** 2).sum(axis=-1)).min(axis=1)


def _points_in_ring(points: np.ndarray, ring: np.ndarray) -> np.ndarray:
    """Ray-casting containment for each point against a closed ring."""
    x = points[:, 0][:, None]
    y = points[:, 1][:, None]
    x1, y1 = ring[:-1, 0][None, :], ring[:-1, 1][None, :]
    x2, y2 = ring[1:, 0][None, :], ring[1:, 1][None, :]
    crosses = (y1 > y) != (y2 > y)
    dy = np.where(y2 - y1 == 0.0, 1.0, y2 - y1)  # masked by `crosses` below
    x_cross = x1 + (y - y1) * (x2 - x1) / dy
    return ((crosses & (x < x_cross)).sum(axis=1) % 2) == 1


def _shoelace(ring: np.ndarray) -> float:
    x, y = ring[:, 0], ring[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - y * np.roll(x, -1)))


def bubble_set(
    pair,
    layout,
    node_radius: float = 0.05,
    grid_cell: float | None = None,
    threshold: float = THRESHOLD,
) -> dict[str, BubbleGeometry | None]:
    """Per-side bubble geometry for one scored alignment pair.

    Non-member nodes of the same graph act as obstacles. An empty side maps
    to None; rendering (opacity from the content score, waviness from the
    coherence score) is the consumer's responsibility.
    """
    if grid_cell is None:
        grid_cell = node_radius / 2.0
    result: dict[str, BubbleGeometry | None] = {}
    for side, node_ids in (("a", pair.nodes_a), ("b", pair.nodes_b)):
        if not node_ids:
            result[side] = None
            continue
        positions = layout.side_positions(side)
        members = np.array([positions[nid] for nid in sorted(node_ids)])
        obstacles = np.array([xy for nid, xy in sorted(positions.items()) if nid not in node_ids]).reshape(-1, 2)
        polygon = bubble_contour(members, obstacles, node_radius, grid_cell, threshold)
        result[side] = BubbleGeometry(
            pair_id=pair.id,
            side=side,
            polygon=tuple((float(x), float(y)) for x, y in polygon),
            content_jaccard=pair.content_jaccard,
            coherence=pair.coherence,
        )
    return result


def bubbles_json(bubbles_by_pair: Mapping[int, dict]) -> list[dict]:
    """Flat JSON list with explicit markers for absent sides."""
    out = []
    for pair_id in sorted(bubbles_by_pair):
        for side in ("a", "b"):
            geometry = bubbles_by_pair[pair_id].get(side)
            if geometry is None:
                out.append({"pair_id": pair_id, "side": side, "empty": True})
            else:
                out.append(geometry.to_json())
    return out
