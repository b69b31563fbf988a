"""Mapper graph construction: filter, overlapping cover, DBSCAN, nerve.

Nodes are DBSCAN clusters of interval preimages; edges connect every pair of
clusters with a nonempty member intersection (the one-dimensional nerve).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple

import numpy as np

from .errors import InvalidParameterError, MissingAttributeError, NonFiniteValueError
from .ingest import RepresentationSet


@dataclass(frozen=True)
class MapperParams:
    # filter: "l2_norm", "attr:<name>", or an explicit per-item value mapping
    filter: str | Mapping[str, float] = "l2_norm"
    num_intervals: int = 50
    overlap: float = 0.5
    dbscan_min_pts: int = 3
    dbscan_eps: float | str = "auto"

    def __post_init__(self):
        if self.num_intervals < 1:
            raise InvalidParameterError(f"num_intervals must be >= 1, got {self.num_intervals}")
        if not 0.0 <= self.overlap < 1.0:
            raise InvalidParameterError(f"overlap must be in [0, 1), got {self.overlap}")
        if self.dbscan_min_pts < 1:
            raise InvalidParameterError(f"dbscan_min_pts must be >= 1, got {self.dbscan_min_pts}")
        if isinstance(self.dbscan_eps, str):
            if self.dbscan_eps != "auto":
                raise InvalidParameterError(f"dbscan_eps must be positive or 'auto', got {self.dbscan_eps!r}")
        elif not self.dbscan_eps > 0:
            raise InvalidParameterError(f"dbscan_eps must be positive, got {self.dbscan_eps}")
        if isinstance(self.filter, str) and self.filter != "l2_norm" and not self.filter.startswith("attr:"):
            raise InvalidParameterError(f"unknown filter {self.filter!r}")

    def filter_label(self) -> str:
        return self.filter if isinstance(self.filter, str) else "custom"

    def to_json(self) -> dict:
        return {
            "filter": self.filter_label(),
            "num_intervals": self.num_intervals,
            "overlap": self.overlap,
            "dbscan_min_pts": self.dbscan_min_pts,
            "dbscan_eps": self.dbscan_eps,
        }


class CoverInterval(NamedTuple):
    lo: float
    hi: float
    items: frozenset[str]


@dataclass(frozen=True)
class MapperNode:
    id: int
    interval_index: int
    members: frozenset[str]
    filter_range: tuple[float, float]


@dataclass(frozen=True)
class MapperGraph:
    nodes: tuple[MapperNode, ...]
    edges: tuple[tuple[int, int, int], ...]  # (u, v, shared count), u < v
    params: MapperParams
    universe: frozenset[str]
    uncovered: frozenset[str]
    resolved_eps: float | None = None

    def node(self, node_id: int) -> MapperNode:
        return self.nodes[node_id]

    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {n.id: set() for n in self.nodes}
        for u, v, _ in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def to_json(self) -> dict:
        params = self.params.to_json()
        if self.resolved_eps is not None:
            params["resolved_eps"] = self.resolved_eps
        return {
            "nodes": [
                {
                    "id": n.id,
                    "interval": n.interval_index,
                    "range": [n.filter_range[0], n.filter_range[1]],
                    "members": sorted(n.members),
                }
                for n in self.nodes
            ],
            "edges": [[u, v, shared] for u, v, shared in self.edges],
            "params": params,
        }


def compute_filter(rset: RepresentationSet, filt: str | Mapping[str, float]) -> dict[str, float]:
    """One finite scalar per item: l2 norm, a stored attribute, or user values."""
    if isinstance(filt, str):
        if filt == "l2_norm":
            norms = np.linalg.norm(rset.matrix, axis=1)
            return {item: float(norms[i]) for i, item in enumerate(rset.items)}
        if filt.startswith("attr:"):
            name = filt[len("attr:"):]
            attrs = rset.numeric_attrs or {}
            if name not in attrs:
                raise MissingAttributeError(f"set {rset.name!r} has no attribute {name!r}")
            per_item = attrs[name]
            missing = [item for item in rset.items if item not in per_item]
            if missing:
                raise MissingAttributeError(f"attribute {name!r} missing for items {missing[:5]}")
            return {item: float(per_item[item]) for item in rset.items}
        raise InvalidParameterError(f"unknown filter {filt!r}")
    values = {}
    for item in rset.items:
        if item not in filt:
            raise MissingAttributeError(f"custom filter missing value for item {item!r}")
        value = float(filt[item])
        if not np.isfinite(value):
            raise NonFiniteValueError(f"custom filter value for {item!r} is not finite")
        values[item] = value
    return values


def build_cover(values: Mapping[str, float], num_intervals: int, overlap: float) -> list[CoverInterval]:
    """Uniform-length overlapping intervals spanning [min, max] of the values.

    Intervals are closed on both ends, so boundary items land in both adjacent
    intervals; consecutive intervals share exactly `overlap` of their length.
    Constant input collapses to a single covering interval.
    """
    if not values:
        return []
    vals = np.array(list(values.values()))
    vmin, vmax = float(vals.min()), float(vals.max())
    everything = frozenset(values)
    if num_intervals == 1 or vmin == vmax:
        return [CoverInterval(vmin, vmax, everything)]
    length = (vmax - vmin) / (num_intervals - (num_intervals - 1) * overlap)
    step = length * (1.0 - overlap)
    intervals = []
    for j in range(num_intervals):
        lo = vmin + j * step
        hi = lo + length
        if j == 0:
            lo = vmin
        if j == num_intervals - 1:
            hi = max(hi, vmax)  # guard float round-off so the max item stays covered
        member_items = frozenset(item for item, v in values.items() if lo <= v <= hi)
        intervals.append(CoverInterval(lo, hi, member_items))
    return intervals


def dbscan(points: np.ndarray, eps: float, min_pts: int) -> list[list[int]]:
    """Euclidean DBSCAN; returns clusters as sorted row-index lists.

    Noise points belong to no cluster. Clusters are ordered by their lowest
    contained row index, which makes the output deterministic.
    """
    if eps <= 0:
        raise InvalidParameterError(f"eps must be positive, got {eps}")
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if n == 0:
        return []
    diffs = points[:, None, :] - points[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diffs, diffs))
    neighbor_mask = dist <= eps
    neighbor_counts = neighbor_mask.sum(axis=1)  # neighborhood includes the point itself
    is_core = neighbor_counts >= min_pts

    labels = np.full(n, -1, dtype=np.int64)
    cluster = 0
    for seed in range(n):
        if labels[seed] != -1 or not is_core[seed]:
            continue
        labels[seed] = cluster
        frontier = [seed]
        while frontier:
            p = frontier.pop()
            if not is_core[p]:
                continue
            for q in np.flatnonzero(neighbor_mask[p]):
                if labels[q] == -1:
                    labels[q] = cluster
                    if is_core[q]:
                        frontier.append(int(q))
        cluster += 1
    clusters = [sorted(np.flatnonzero(labels == c).tolist()) for c in range(cluster)]
    clusters.sort(key=lambda c: c[0])
    return clusters


def auto_eps(points: np.ndarray, min_pts: int) -> float:
    """Knee of the sorted k-distance curve (k = min_pts).

    The knee is the point of maximum perpendicular distance to the chord from
    the first to the last curve point; a flat/linear curve (chord distance
    identically zero) falls back to the median k-distance.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if n < min_pts + 1:
        raise InvalidParameterError(f"need at least min_pts + 1 = {min_pts + 1} points, got {n}")
    diffs = points[:, None, :] - points[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diffs, diffs))
    dist.sort(axis=1)
    kdist = np.sort(dist[:, min_pts])  # column 0 is the self-distance
    return knee_point(kdist)


def knee_point(curve: np.ndarray) -> float:
    """Value at the index of maximum chord distance on an ascending curve."""
    curve = np.asarray(curve, dtype=np.float64)
    m = curve.shape[0]
    if m == 1:
        return float(curve[0])
    x = np.arange(m, dtype=np.float64)
    chord = np.array([x[-1] - x[0], curve[-1] - curve[0]])
    norm = np.linalg.norm(chord)
    rel_x = x - x[0]
    rel_y = curve - curve[0]
    # cross product magnitude = perpendicular distance * |chord|
    perp = np.abs(rel_x * chord[1] - rel_y * chord[0]) / norm
    if float(perp.max()) < 1e-12:
        return float(np.median(curve))
    return float(curve[int(np.argmax(perp))])


def build_mapper(rset: RepresentationSet, params: MapperParams) -> MapperGraph:
    """One node per (interval, DBSCAN cluster); edges from member overlap."""
    values = compute_filter(rset, params.filter)
    cover = build_cover(values, params.num_intervals, params.overlap)
    if isinstance(params.dbscan_eps, str):
        eps = auto_eps(rset.matrix, params.dbscan_min_pts)
    else:
        eps = float(params.dbscan_eps)

    nodes: list[MapperNode] = []
    for interval_index, (lo, hi, interval_items) in enumerate(cover):
        ordered = [item for item in rset.items if item in interval_items]
        if not ordered:
            continue
        clusters = dbscan(rset.rows(ordered), eps, params.dbscan_min_pts)
        for local_rows in clusters:
            members = frozenset(ordered[r] for r in local_rows)
            nodes.append(MapperNode(id=len(nodes), interval_index=interval_index, members=members, filter_range=(lo, hi)))

    # nerve edges via the item -> nodes inverted index
    containing: dict[str, list[int]] = {}
    for node in nodes:
        for item in node.members:
            containing.setdefault(item, []).append(node.id)
    shared_counts: dict[tuple[int, int], int] = {}
    for node_ids in containing.values():
        node_ids.sort()
        for i, u in enumerate(node_ids):
            for v in node_ids[i + 1:]:
                shared_counts[(u, v)] = shared_counts.get((u, v), 0) + 1
    edges = tuple(sorted((u, v, c) for (u, v), c in shared_counts.items()))

    covered = frozenset(containing)
    return MapperGraph(
        nodes=tuple(nodes),
        edges=edges,
        params=params,
        universe=frozenset(rset.items),
        uncovered=frozenset(rset.items) - covered,
        resolved_eps=eps,
    )
