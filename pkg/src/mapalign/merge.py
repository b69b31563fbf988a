"""Entropy-guided greedy aggregation of an alignment pair into supernodes.

Starting from one supernode per mapper node, connected supernodes on either
side are merged greedily, always taking the merge that most reduces the
chosen cross-edge entropy. The conditional strategy weighs each supernode's
connection dispersion; the raw strategy uses the plain edge-weight entropy
(which collapses every component, kept for contrast). Every run is recorded
as a replayable sequence of steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import InvalidParameterError
from .joint import JointGraph, jaccard

_MIN_DECREASE = 1e-12

STRATEGIES = ("conditional", "raw")


@dataclass(frozen=True)
class Supernode:
    id: int
    side: str
    members: frozenset[str]
    constituents: frozenset[int]
    internal_edges: tuple[tuple[int, int], ...]

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "side": self.side,
            "members": sorted(self.members),
            "constituents": sorted(self.constituents),
            "internal_edges": [list(e) for e in self.internal_edges],
        }


@dataclass(frozen=True)
class MergeStep:
    side: str
    merged: tuple[int, int]
    new_id: int
    h_after: float


@dataclass(frozen=True)
class MergeSequence:
    strategy: str
    initial: tuple[Supernode, ...]
    steps: tuple[MergeStep, ...]
    initial_h: float
    final_h: float
    edges_a: tuple[tuple[int, int], ...]  # pair-restricted intra edges, for replay
    edges_b: tuple[tuple[int, int], ...]

    def to_json(self) -> dict:
        return {
            "strategy": self.strategy,
            "steps": [
                {"side": s.side, "merged": list(s.merged), "new_id": s.new_id, "H_after": s.h_after}
                for s in self.steps
            ],
            "final_H": self.final_h,
        }


def inter_edge_weights(state: "Iterable[Supernode] | Mapping[int, Supernode]") -> dict[tuple[int, int], float]:
    """Jaccard weight over member unions for every overlapping (a, b) pair."""
    supernodes = list(state.values()) if isinstance(state, Mapping) else list(state)
    side_a = [s for s in supernodes if s.side == "a"]
    side_b = [s for s in supernodes if s.side == "b"]
    weights: dict[tuple[int, int], float] = {}
    for sa in side_a:
        for sb in side_b:
            if sa.members & sb.members:
                weights[(sa.id, sb.id)] = jaccard(sa.members, sb.members)
    return weights


def node_entropy(node_id: int, weights: Mapping[tuple[int, int], float]) -> float:
    """Dispersion of a supernode's cross-graph connection weights (natural log)."""
    incident = [w for (a, b), w in weights.items() if a == node_id or b == node_id]
    if not incident:
        raise InvalidParameterError(f"supernode {node_id} has no inter-edges; entropy undefined")
    total = sum(incident)
    return -sum((w / total) * math.log(w / total) for w in incident)


def total_entropy(weights: Mapping[tuple[int, int], float]) -> float:
    """Weighted sum of node entropies over both sides' participating supernodes.

    Node weights are incident-weight sums normalized by the directed grand
    total (each edge counted once from each endpoint), so they sum to one.
    """
    if not weights:
        return 0.0
    incident: dict[tuple[str, int], list[float]] = {}
    for (a, b), w in weights.items():
        incident.setdefault(("a", a), []).append(w)
        incident.setdefault(("b", b), []).append(w)
    grand = 2.0 * sum(weights.values())
    h_total = 0.0
    for edge_weights in incident.values():
        strength = sum(edge_weights)
        h_i = -sum((w / strength) * math.log(w / strength) for w in edge_weights)
        h_total += (strength / grand) * h_i
    return h_total


def raw_entropy(weights: Mapping[tuple[int, int], float]) -> float:
    """Entropy of the normalized inter-edge weight distribution."""
    if not weights:
        return 0.0
    total = sum(weights.values())
    return -sum((w / total) * math.log(w / total) for w in weights.values())


def _objective(strategy: str):
    if strategy == "conditional":
        return total_entropy
    if strategy == "raw":
        return raw_entropy
    raise InvalidParameterError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")


def _restricted_edges(graph_edges, nodes: frozenset[int]) -> tuple[tuple[int, int], ...]:
    return tuple((u, v) for u, v, _ in graph_edges if u in nodes and v in nodes)


def initial_state(pair, joint: JointGraph) -> tuple[dict[int, Supernode], tuple, tuple]:
    """One supernode per mapper node; ids dense, side a first."""
    edges_a = _restricted_edges(joint.graph_a.edges, frozenset(pair.nodes_a))
    edges_b = _restricted_edges(joint.graph_b.edges, frozenset(pair.nodes_b))
    state: dict[int, Supernode] = {}
    next_id = 0
    for side, node_ids, graph in (("a", pair.nodes_a, joint.graph_a), ("b", pair.nodes_b, joint.graph_b)):
        for nid in sorted(node_ids):
            state[next_id] = Supernode(
                id=next_id, side=side, members=graph.nodes[nid].members, constituents=frozenset([nid]), internal_edges=()
            )
            next_id += 1
    return state, edges_a, edges_b


def _merged_supernode(state: Mapping[int, Supernode], u: int, v: int, new_id: int, side_edges) -> Supernode:
    su, sv = state[u], state[v]
    constituents = su.constituents | sv.constituents
    internal = set(su.internal_edges) | set(sv.internal_edges)
    for x, y in side_edges:
        if x in constituents and y in constituents:
            internal.add((x, y))
    return Supernode(
        id=new_id,
        side=su.side,
        members=su.members | sv.members,
        constituents=constituents,
        internal_edges=tuple(sorted(internal)),
    )


def _merged_weights(
    state: Mapping[int, Supernode], weights: Mapping[tuple[int, int], float], merged: Supernode, u: int, v: int
) -> dict[tuple[int, int], float]:
    """Weights after replacing u, v with the merged supernode (incremental)."""
    out = {key: w for key, w in weights.items() if u not in key and v not in key}
    for other in state.values():
        if other.side == merged.side or other.id in (u, v):
            continue
        if merged.members & other.members:
            key = (merged.id, other.id) if merged.side == "a" else (other.id, merged.id)
            out[key] = jaccard(merged.members, other.members)
    return out


def greedy_merge(pair, joint: JointGraph, strategy: str = "conditional", max_steps: int | None = None) -> MergeSequence:
    """Greedy best-decrease merging until no candidate improves the objective.

    Candidates are supernode pairs joined by an intra-edge on either side;
    ties break toward side a, then the lowest id pair. Decreases below 1e-12
    are treated as no improvement to keep the loop strictly monotone.
    """
    objective = _objective(strategy)
    state, edges_a, edges_b = initial_state(pair, joint)
    side_edges = {"a": edges_a, "b": edges_b}
    weights = inter_edge_weights(state)

    # supernode adjacency from the constituent-level intra edges
    node_to_sn = {("a" if s.side == "a" else "b", nid): s.id for s in state.values() for nid in s.constituents}
    adjacency: dict[int, set[int]] = {sid: set() for sid in state}
    for side in ("a", "b"):
        for x, y in side_edges[side]:
            sx, sy = node_to_sn[(side, x)], node_to_sn[(side, y)]
            if sx != sy:
                adjacency[sx].add(sy)
                adjacency[sy].add(sx)

    initial = tuple(state[sid] for sid in sorted(state))
    initial_h = objective(weights)
    steps: list[MergeStep] = []
    next_id = max(state, default=-1) + 1
    current_h = initial_h

    while max_steps is None or len(steps) < max_steps:
        candidates = []
        for sid in sorted(adjacency):
            for other in sorted(adjacency[sid]):
                if sid < other:
                    candidates.append((state[sid].side, sid, other))
        candidates.sort(key=lambda c: (c[0], c[1], c[2]))

        best = None
        for side, u, v in candidates:
            merged = _merged_supernode(state, u, v, next_id, side_edges[side])
            trial_weights = _merged_weights(state, weights, merged, u, v)
            h = objective(trial_weights)
            decrease = current_h - h
            if decrease > _MIN_DECREASE and (best is None or decrease > best[0] + _MIN_DECREASE):
                best = (decrease, side, u, v, merged, trial_weights, h)
        if best is None:
            break
        _, side, u, v, merged, weights, current_h = best
        neighbors = (adjacency.pop(u) | adjacency.pop(v)) - {u, v}
        for n in neighbors:
            adjacency[n].discard(u)
            adjacency[n].discard(v)
            adjacency[n].add(merged.id)
        adjacency[merged.id] = neighbors
        del state[u], state[v]
        state[merged.id] = merged
        steps.append(MergeStep(side=side, merged=(u, v), new_id=merged.id, h_after=current_h))
        next_id += 1

    return MergeSequence(
        strategy=strategy,
        initial=initial,
        steps=tuple(steps),
        initial_h=initial_h,
        final_h=current_h,
        edges_a=edges_a,
        edges_b=edges_b,
    )


def state_at(sequence: MergeSequence, step: int | None = None) -> dict[int, Supernode]:
    """Replay the first `step` merges from the initial state (all when None)."""
    if step is None:
        step = len(sequence.steps)
    if not 0 <= step <= len(sequence.steps):
        raise InvalidParameterError(f"step must be in [0, {len(sequence.steps)}], got {step}")
    state = {sn.id: sn for sn in sequence.initial}
    side_edges = {"a": sequence.edges_a, "b": sequence.edges_b}
    for record in sequence.steps[:step]:
        u, v = record.merged
        merged = _merged_supernode(state, u, v, record.new_id, side_edges[record.side])
        del state[u], state[v]
        state[merged.id] = merged
    return state
