"""Shared synthetic fixtures and independent oracle helpers."""

from __future__ import annotations

import numpy as np
import pytest

from mapalign.align import AlignmentPair, node_items
from mapalign.ingest import RepresentationSet
from mapalign.joint import JointGraph, build_joint
from mapalign.mapper import MapperGraph, MapperNode, MapperParams

_FIXTURE_PARAMS = MapperParams(num_intervals=1, dbscan_min_pts=1, dbscan_eps=1.0)


def synthetic_graph(member_sets, edges, universe=None) -> MapperGraph:
    """MapperGraph built directly from member sets and an edge list."""
    if universe is None:
        universe = frozenset().union(*[frozenset(s) for s in member_sets])
    nodes = tuple(
        MapperNode(id=i, interval_index=0, members=frozenset(s), filter_range=(0.0, 1.0))
        for i, s in enumerate(member_sets)
    )
    edge_tuples = tuple((u, v, len(nodes[u].members & nodes[v].members) or 1) for u, v in edges)
    return MapperGraph(
        nodes=nodes, edges=edge_tuples, params=_FIXTURE_PARAMS, universe=frozenset(universe), uncovered=frozenset()
    )


def whole_graph_pair(joint: JointGraph) -> AlignmentPair:
    """One pair spanning every node of both graphs."""
    nodes_a = frozenset(n.id for n in joint.graph_a.nodes)
    nodes_b = frozenset(n.id for n in joint.graph_b.nodes)
    return AlignmentPair(
        id=0,
        nodes_a=nodes_a,
        nodes_b=nodes_b,
        items_a=node_items(joint, "a", nodes_a),
        items_b=node_items(joint, "b", nodes_b),
        content_jaccard=1.0,
        coherence=0.0,
    )


def r_shape_cloud(seed: int = 0, noise: float = 0.008) -> np.ndarray:
    """Point cloud shaped like the letter R: stem, loop, and diagonal leg."""
    rng = np.random.default_rng(seed)
    pts = []
    for y in np.linspace(0.0, 2.3, 60):  # stem
        pts.append((0.0, y))
    for t in np.linspace(0, 2 * np.pi, 80, endpoint=False):  # loop touching the stem top
        pts.append((0.7 * np.sin(t), 3.0 - 0.7 * np.cos(t)))
    for t in np.linspace(0.0, 1.0, 60):  # leg from the junction down-right
        pts.append((0.05 + 1.55 * t, 2.25 - 2.05 * t))
    return np.array(pts) + rng.normal(scale=noise, size=(len(pts), 2))


def r_shape_mapper(seed: int = 0):
    pts = r_shape_cloud(seed)
    items = tuple(f"p{i}" for i in range(len(pts)))
    rset = RepresentationSet("rshape", items, pts)
    heights = {item: float(pts[i, 1]) for i, item in enumerate(items)}
    params = MapperParams(filter=heights, num_intervals=6, overlap=0.25, dbscan_min_pts=3, dbscan_eps=0.18)
    from mapalign.mapper import build_mapper

    return build_mapper(rset, params)


def graph_cycle_count(graph: MapperGraph) -> int:
    """Independent cycles: |E| - |V| + #components (union-find)."""
    parent = {n.id: n.id for n in graph.nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v, _ in graph.edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    components = len({find(n.id) for n in graph.nodes})
    return len(graph.edges) - len(graph.nodes) + components


def brute_force_nerve(graph: MapperGraph) -> set[tuple[int, int]]:
    """Oracle: enumerate every node pair and intersect member sets."""
    edges = set()
    for i, u in enumerate(graph.nodes):
        for v in graph.nodes[i + 1:]:
            if u.members & v.members:
                edges.add((u.id, v.id))
    return edges


def planted_joint(seed: int, nodes_per_comm: int = 12, pool: int = 40, sub: int = 8,
                  p_in: float = 0.9, p_cross: float = 0.05):
    """Two-community joint graph: dense intra blocks, sparse cross edges,
    inter-graph edges only within communities (item pools are disjoint)."""
    rng = np.random.default_rng(seed)
    pools = [[f"c{c}_{i}" for i in range(pool)] for c in range(2)]
    universe = frozenset(pools[0]) | frozenset(pools[1])

    def make(base_sets=None):
        sets = []
        for c in range(2):
            for i in range(nodes_per_comm):
                if base_sets is None:
                    members = set(rng.choice(pools[c], size=sub, replace=False))
                else:
                    src = set(base_sets[c * nodes_per_comm + i])
                    src -= set(rng.choice(sorted(src), size=2, replace=False))
                    members = src | set(rng.choice(pools[c], size=2, replace=False))
                sets.append(frozenset(members))
        edges = []
        n = 2 * nodes_per_comm
        for u in range(n):
            for v in range(u + 1, n):
                same = (u // nodes_per_comm) == (v // nodes_per_comm)
                if rng.random() < (p_in if same else p_cross):
                    edges.append((u, v))
        return synthetic_graph(sets, edges, universe), sets

    graph_a, sets_a = make()
    graph_b, _ = make(base_sets=sets_a)
    return build_joint(graph_a, graph_b), nodes_per_comm


def fig6_scenario():
    """Mixed 4-node path on side a vs two clean components on side b."""
    a_sets = [
        {"x1", "x2", "x3"},
        {"x3", "x4", "x5", "m1"},
        {"y1", "y2", "y3", "m1"},
        {"y3", "y4", "y5"},
    ]
    b_sets = [
        {"x1", "x2", "x3"},
        {"x3", "x4", "x5", "m1"},
        {"y1", "y2", "y3"},
        {"y3", "y4", "y5"},
    ]
    universe = frozenset().union(*a_sets, *b_sets)
    graph_a = synthetic_graph(a_sets, [(0, 1), (1, 2), (2, 3)], universe)
    graph_b = synthetic_graph(b_sets, [(0, 1), (2, 3)], universe)
    joint = build_joint(graph_a, graph_b)
    return whole_graph_pair(joint), joint


def identity_path_joint(n: int = 6) -> JointGraph:
    """Two n-node path graphs with identity correspondences (w = 1)."""
    sets = [{f"m{i}"} for i in range(n)]
    edges = [(i, i + 1) for i in range(n - 1)]
    universe = frozenset(f"m{i}" for i in range(n))
    return build_joint(synthetic_graph(sets, edges, universe), synthetic_graph(sets, edges, universe))


def random_membership_joint(seed: int, n_nodes: int = 10, pool: int = 25, lo: int = 2, hi: int = 6):
    """Random member sets on both sides plus random intra edges."""
    rng = np.random.default_rng(seed)
    items = [f"t{i}" for i in range(pool)]
    universe = frozenset(items)

    def make():
        sets = []
        for _ in range(n_nodes):
            size = int(rng.integers(lo, hi + 1))
            sets.append(frozenset(rng.choice(items, size=size, replace=False)))
        edges = []
        for u in range(n_nodes):
            for v in range(u + 1, n_nodes):
                if sets[u] & sets[v] and rng.random() < 0.5:
                    edges.append((u, v))
        return synthetic_graph(sets, edges, universe)

    return build_joint(make(), make())


def point_in_polygon(point, ring) -> bool:
    """Ray-casting oracle on a closed ring (first vertex == last)."""
    x, y = float(point[0]), float(point[1])
    inside = False
    for (x1, y1), (x2, y2) in zip(ring[:-1], ring[1:]):
        if (y1 > y) != (y2 > y):
            x_cross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < x_cross:
                inside = not inside
    return inside


def min_separated_points(rng: np.random.Generator, count: int, spacing: float, span: float = 2.0) -> np.ndarray:
    """Rejection-sample `count` points with pairwise distance >= spacing."""
    pts: list[np.ndarray] = []
    attempts = 0
    while len(pts) < count and attempts < 20000:
        cand = rng.uniform(0.0, span, 2)
        if all(np.hypot(*(cand - p)) >= spacing for p in pts):
            pts.append(cand)
        attempts += 1
    return np.array(pts)


@pytest.fixture(scope="session")
def demo_session_dir(tmp_path_factory):
    from mapalign.demo import write_demo

    directory = tmp_path_factory.mktemp("demo_data")
    paths = write_demo(directory, seed=0)
    return paths
