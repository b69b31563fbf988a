"""Classification of alignment pairs into five correspondence patterns.

Each side of a pair is split into connected components over its own graph's
edges; components are linked by a meta-edge when their item sets overlap
enough. The shape of the linked component groups determines the pattern:
one-to-one, fan-out, fan-in, crossing, or vanishing/appearance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .joint import JointGraph, jaccard

MOTIF_KINDS = ("one_to_one", "fan_out", "fan_in", "crossing", "vanishing_appearance")

# tie-break priority when a pair's meta-components hold equally many items
_PRIORITY = {"crossing": 0, "fan_out": 1, "fan_in": 2, "one_to_one": 3, "vanishing_appearance": 4}

DEFAULT_TAU = 0.05


@dataclass(frozen=True)
class MotifLabel:
    kind: str
    meta_components: tuple[tuple[int, int, int], ...]  # (components_a, components_b, item count)

    def to_json(self) -> dict:
        return {"kind": self.kind, "meta_components": [list(mc) for mc in self.meta_components]}


@dataclass(frozen=True)
class ComponentCorrespondence:
    comps_a: tuple[frozenset[int], ...]
    comps_b: tuple[frozenset[int], ...]
    comp_items_a: tuple[frozenset[str], ...]
    comp_items_b: tuple[frozenset[str], ...]
    meta_edges: tuple[tuple[int, int, float], ...]  # (index into comps_a, index into comps_b, jaccard)


def connected_components(node_ids: Iterable[int], edges: Iterable[tuple[int, int]]) -> list[frozenset[int]]:
    """Union-find components of the subgraph induced by `node_ids`."""
    nodes = sorted(set(node_ids))
    parent = {n: n for n in nodes}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    keep = set(nodes)
    for u, v in edges:
        if u in keep and v in keep:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)
    groups: dict[int, set[int]] = {}
    for n in nodes:
        groups.setdefault(find(n), set()).add(n)
    return [frozenset(groups[root]) for root in sorted(groups)]


def component_correspondence(pair, joint: JointGraph, tau: float = DEFAULT_TAU) -> ComponentCorrespondence:
    """Connected components per side plus item-overlap meta-edges >= tau."""
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    comps_a = connected_components(pair.nodes_a, ((u, v) for u, v, _ in joint.graph_a.edges))
    comps_b = connected_components(pair.nodes_b, ((u, v) for u, v, _ in joint.graph_b.edges))
    items_a = tuple(_component_items(joint.graph_a, comp) for comp in comps_a)
    items_b = tuple(_component_items(joint.graph_b, comp) for comp in comps_b)
    meta_edges = []
    for i, ia in enumerate(items_a):
        for j, jb in enumerate(items_b):
            if not ia and not jb:
                continue
            weight = jaccard(ia, jb)
            if weight >= tau and weight > 0:
                meta_edges.append((i, j, weight))
    return ComponentCorrespondence(
        comps_a=tuple(comps_a),
        comps_b=tuple(comps_b),
        comp_items_a=items_a,
        comp_items_b=items_b,
        meta_edges=tuple(meta_edges),
    )


def _component_items(graph, comp: frozenset[int]) -> frozenset[str]:
    items: set[str] = set()
    for nid in comp:
        items |= graph.nodes[nid].members
    return frozenset(items)


def classify(corr: ComponentCorrespondence) -> MotifLabel:
    """Pair-level pattern from the connected groups of the meta-graph.

    Group shapes map to kinds: (1,1) one-to-one, (1,>1) fan-out, (>1,1)
    fan-in, (>1,>1) crossing, single-side groups vanishing/appearance. The
    pair takes the kind of its largest group by item count; ties resolve by
    crossing > fan_out > fan_in > one_to_one > vanishing_appearance.
    """
    na, nb = len(corr.comps_a), len(corr.comps_b)
    # meta-graph vertices: ("a", i) and ("b", j)
    adjacency: dict[tuple[str, int], set[tuple[str, int]]] = {}
    for side, count in (("a", na), ("b", nb)):
        for i in range(count):
            adjacency[(side, i)] = set()
    for i, j, _ in corr.meta_edges:
        adjacency[("a", i)].add(("b", j))
        adjacency[("b", j)].add(("a", i))

    seen: set[tuple[str, int]] = set()
    groups: list[tuple[int, int, int]] = []
    kinds: list[str] = []
    for start in sorted(adjacency):
        if start in seen:
            continue
        stack, group = [start], set()
        while stack:
            vertex = stack.pop()
            if vertex in seen:
                continue
            seen.add(vertex)
            group.add(vertex)
            stack.extend(adjacency[vertex] - seen)
        count_a = sum(1 for side, _ in group if side == "a")
        count_b = len(group) - count_a
        items: set[str] = set()
        for side, idx in group:
            items |= corr.comp_items_a[idx] if side == "a" else corr.comp_items_b[idx]
        groups.append((count_a, count_b, len(items)))
        kinds.append(_group_kind(count_a, count_b))

    if not groups:
        return MotifLabel(kind="vanishing_appearance", meta_components=())
    order = sorted(range(len(groups)), key=lambda g: (-groups[g][2], _PRIORITY[kinds[g]]))
    meta_components = tuple(groups[g] for g in order)
    return MotifLabel(kind=kinds[order[0]], meta_components=meta_components)


def _group_kind(count_a: int, count_b: int) -> str:
    if count_a == 0 or count_b == 0:
        return "vanishing_appearance"
    if count_a == 1 and count_b == 1:
        return "one_to_one"
    if count_a == 1:
        return "fan_out"
    if count_b == 1:
        return "fan_in"
    return "crossing"


def classify_pair(pair, joint: JointGraph, tau: float = DEFAULT_TAU) -> MotifLabel:
    return classify(component_correspondence(pair, joint, tau))


def query_by_motif(pairs: Sequence, kind: str):
    """Stable-order subsequence of pairs whose motif kind matches."""
    if kind not in MOTIF_KINDS:
        raise ValueError(f"unknown motif kind {kind!r}; expected one of {MOTIF_KINDS}")
    return [pair for pair in pairs if pair.motif is not None and pair.motif.kind == kind]
