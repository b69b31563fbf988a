"""Joint graph: two mapper graphs plus Jaccard-weighted inter-edges."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .errors import InvalidParameterError, MismatchedUniverseError
from .mapper import MapperGraph


class InterEdge(NamedTuple):
    a: int
    b: int
    w: float
    shared: frozenset[str]


@dataclass(frozen=True)
class JointGraph:
    graph_a: MapperGraph
    graph_b: MapperGraph
    inter_edges: tuple[InterEdge, ...]

    def inter_json(self) -> dict:
        return {
            "inter_edges": [
                {"a": e.a, "b": e.b, "w": e.w, "shared": sorted(e.shared)} for e in self.inter_edges
            ]
        }


def jaccard(a: Iterable[str], b: Iterable[str]) -> float:
    """|a ∩ b| / |a ∪ b|; errors when both sets are empty."""
    a, b = set(a), set(b)
    union = len(a | b)
    if union == 0:
        raise InvalidParameterError("jaccard undefined for two empty sets")
    return len(a & b) / union


def build_joint(a: MapperGraph, b: MapperGraph) -> JointGraph:
    """Enumerate all inter-edges between nodes with overlapping members."""
    if a.universe != b.universe:
        raise MismatchedUniverseError(
            "graphs were built over different item universes",
            detail={"only_a": len(a.universe - b.universe), "only_b": len(b.universe - a.universe)},
        )
    containing_b: dict[str, list[int]] = {}
    for node in b.nodes:
        for item in node.members:
            containing_b.setdefault(item, []).append(node.id)

    edges: list[InterEdge] = []
    for node_a in a.nodes:
        shared_by_b: dict[int, set[str]] = {}
        for item in node_a.members:
            for b_id in containing_b.get(item, ()):
                shared_by_b.setdefault(b_id, set()).add(item)
        for b_id in sorted(shared_by_b):
            shared = shared_by_b[b_id]
            union = len(node_a.members | b.nodes[b_id].members)
            edges.append(InterEdge(node_a.id, b_id, len(shared) / union, frozenset(shared)))
    return JointGraph(graph_a=a, graph_b=b, inter_edges=tuple(edges))
