"""Joint force-directed layout of two mapper graphs.

The objective is the sum of each graph's spring + repulsion energy and a
cross-graph quadratic pulling matched nodes together, scaled by the
alignment strength. Optimization is monotone accepted-step gradient descent,
updating each graph's block in turn; a block's step is accepted only if the
energy terms involving that block do not increase. Because a block's
acceptance never consults the other graph's internal energy, setting the
alignment strength to zero reproduces two fully independent optimizations
bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import CoincidentNodesError, InvalidParameterError
from .joint import JointGraph
from .mapper import MapperGraph

NodeKey = tuple[str, int]  # ("a" | "b", node id)

_COINCIDENT = 1e-12
_MAX_HALVINGS = 20


@dataclass(frozen=True)
class LayoutParams:
    alignment_strength: float = 1.0
    preferred_edge_length: float = 1.0
    repulsion: float = 0.01
    max_iters: int = 500
    step_size: float = 0.05
    step_decay: float = 0.99
    seed: int = 0
    convergence_tol: float | None = None  # defaults to 1e-4 * preferred_edge_length

    def __post_init__(self):
        if self.alignment_strength < 0:
            raise InvalidParameterError(f"alignment_strength must be >= 0, got {self.alignment_strength}")
        if self.preferred_edge_length <= 0:
            raise InvalidParameterError("preferred_edge_length must be positive")
        if self.repulsion < 0:
            raise InvalidParameterError("repulsion must be >= 0")
        if not 0 < self.step_decay <= 1:
            raise InvalidParameterError("step_decay must be in (0, 1]")
        if self.step_size <= 0:
            raise InvalidParameterError("step_size must be positive")
        if self.convergence_tol is not None and self.convergence_tol <= 0:
            raise InvalidParameterError("convergence_tol must be positive")

    @property
    def tol(self) -> float:
        return self.convergence_tol if self.convergence_tol is not None else 1e-4 * self.preferred_edge_length

    def to_json(self) -> dict:
        return {
            "alignment_strength": self.alignment_strength,
            "preferred_edge_length": self.preferred_edge_length,
            "repulsion": self.repulsion,
            "max_iters": self.max_iters,
            "step_size": self.step_size,
            "step_decay": self.step_decay,
            "seed": self.seed,
            "convergence_tol": self.tol,
        }


@dataclass
class LayoutResult:
    positions: dict[NodeKey, tuple[float, float]]
    final_energy: float
    energy_trace: list[float]
    offsets: dict[str, tuple[float, float]] = field(default_factory=lambda: {"a": (0.0, 0.0), "b": (0.0, 0.0)})

    def side_positions(self, side: str) -> dict[int, tuple[float, float]]:
        return {nid: xy for (s, nid), xy in self.positions.items() if s == side}

    def to_json(self) -> dict:
        return {
            "positions": {
                side: {str(nid): [x, y] for (s, nid), (x, y) in sorted(self.positions.items()) if s == side}
                for side in ("a", "b")
            },
            "offsets": {side: list(off) for side, off in self.offsets.items()},
            "final_energy": self.final_energy,
            "energy_trace": self.energy_trace,
        }


class _Instance:
    """Index arrays for vectorized energy/gradient evaluation."""

    def __init__(self, joint: JointGraph):
        self.keys: list[NodeKey] = [("a", n.id) for n in joint.graph_a.nodes] + [
            ("b", n.id) for n in joint.graph_b.nodes
        ]
        self.index = {key: i for i, key in enumerate(self.keys)}
        self.n = len(self.keys)
        self.blocks = {
            "a": np.arange(len(joint.graph_a.nodes)),
            "b": np.arange(len(joint.graph_a.nodes), self.n),
        }
        self.edges = {
            "a": np.array([(self.index[("a", u)], self.index[("a", v)]) for u, v, _ in joint.graph_a.edges], dtype=np.int64).reshape(-1, 2),
            "b": np.array([(self.index[("b", u)], self.index[("b", v)]) for u, v, _ in joint.graph_b.edges], dtype=np.int64).reshape(-1, 2),
        }
        self.inter_i = np.array([self.index[("a", e.a)] for e in joint.inter_edges], dtype=np.int64)
        self.inter_j = np.array([self.index[("b", e.b)] for e in joint.inter_edges], dtype=np.int64)
        self.inter_w = np.array([e.w for e in joint.inter_edges], dtype=np.float64)

    def intra_energy(self, pos: np.ndarray, side: str, params: LayoutParams) -> float:
        block = self.blocks[side]
        total = 0.0
        edges = self.edges[side]
        if edges.shape[0]:
            d = np.linalg.norm(pos[edges[:, 0]] - pos[edges[:, 1]], axis=1)
            total += float(np.sum((d - params.preferred_edge_length) ** 2))
        if params.repulsion > 0 and block.size > 1:
            p = pos[block]
            diff = p[:, None, :] - p[None, :, :]
            dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
            np.fill_diagonal(dist, np.inf)
            if float(dist.min()) < _COINCIDENT:
                return float("inf")
            total += float(np.sum(params.repulsion / dist))  # ordered pairs: each pair counted twice
        return total

    def align_energy(self, pos: np.ndarray) -> float:
        if not self.inter_w.size:
            return 0.0
        d2 = np.sum((pos[self.inter_i] - pos[self.inter_j]) ** 2, axis=1)
        return float(np.sum(self.inter_w * d2))

    def gradient(self, pos: np.ndarray, params: LayoutParams, side: str | None = None) -> np.ndarray:
        """Gradient of the full energy; zero rows outside `side` when given."""
        grad = np.zeros_like(pos)
        sides = ("a", "b") if side is None else (side,)
        for s in sides:
            edges = self.edges[s]
            if edges.shape[0]:
                u, v = edges[:, 0], edges[:, 1]
                delta = pos[u] - pos[v]
                d = np.linalg.norm(delta, axis=1)
                d = np.maximum(d, _COINCIDENT)
                coef = 2.0 * (d - params.preferred_edge_length) / d
                contrib = coef[:, None] * delta
                np.add.at(grad, u, contrib)
                np.add.at(grad, v, -contrib)
            block = self.blocks[s]
            if params.repulsion > 0 and block.size > 1:
                p = pos[block]
                diff = p[:, None, :] - p[None, :, :]
                dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
                np.fill_diagonal(dist, np.inf)
                dist = np.maximum(dist, _COINCIDENT)
                # d/dp_u of sum over ordered pairs k/d = -2k (p_u - p_v) / d^3
                grad[block] += np.einsum("ij,ijk->ik", -2.0 * params.repulsion / dist**3, diff)
        if params.alignment_strength > 0 and self.inter_w.size:
            delta = pos[self.inter_i] - pos[self.inter_j]
            contrib = (2.0 * params.alignment_strength * self.inter_w)[:, None] * delta
            if side in (None, "a"):
                np.add.at(grad, self.inter_i, contrib)
            if side in (None, "b"):
                np.add.at(grad, self.inter_j, -contrib)
        if side is not None:
            mask = np.zeros(self.n, dtype=bool)
            mask[self.blocks[side]] = True
            grad[~mask] = 0.0
        return grad

    def side_energy(self, pos: np.ndarray, side: str, params: LayoutParams) -> float:
        """Energy terms that move when `side`'s block moves."""
        return self.intra_energy(pos, side, params) + params.alignment_strength * self.align_energy(pos)


def energy(
    positions: Mapping[NodeKey, tuple[float, float]], joint: JointGraph, params: LayoutParams
) -> tuple[float, float, float, float]:
    """(total, intra_a, intra_b, align) for the given node positions."""
    inst = _Instance(joint)
    pos = np.array([positions[key] for key in inst.keys], dtype=np.float64).reshape(inst.n, 2)
    intra_a = inst.intra_energy(pos, "a", params)
    intra_b = inst.intra_energy(pos, "b", params)
    for side, value in (("a", intra_a), ("b", intra_b)):
        if value == float("inf"):
            raise CoincidentNodesError(f"coincident node pair in graph {side}")
    align = inst.align_energy(pos)
    return intra_a + intra_b + params.alignment_strength * align, intra_a, intra_b, align


def energy_gradient(
    positions: Mapping[NodeKey, tuple[float, float]], joint: JointGraph, params: LayoutParams
) -> dict[NodeKey, tuple[float, float]]:
    """Analytic gradient of the total energy, keyed like `positions`."""
    inst = _Instance(joint)
    pos = np.array([positions[key] for key in inst.keys], dtype=np.float64).reshape(inst.n, 2)
    grad = inst.gradient(pos, params)
    return {key: (float(grad[i, 0]), float(grad[i, 1])) for i, key in enumerate(inst.keys)}


def _initial_positions(inst: _Instance, params: LayoutParams) -> np.ndarray:
    pos = np.zeros((inst.n, 2))
    for side_idx, side in enumerate(("a", "b")):
        block = inst.blocks[side]
        if block.size:
            rng = np.random.default_rng(np.random.SeedSequence([params.seed, side_idx]))
            pos[block] = rng.uniform(0.0, 1.0, size=(block.size, 2))
    return pos


def _jitter_coincident(pos: np.ndarray, inst: _Instance, params: LayoutParams) -> None:
    for side_idx, side in enumerate(("a", "b")):
        block = inst.blocks[side]
        if block.size < 2:
            continue
        rng = np.random.default_rng(np.random.SeedSequence([params.seed, side_idx, 74]))
        for _ in range(100):
            p = pos[block]
            diff = p[:, None, :] - p[None, :, :]
            dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
            np.fill_diagonal(dist, np.inf)
            clashes = np.argwhere(dist < _COINCIDENT)
            if not clashes.size:
                break
            for i, j in clashes:
                if i < j:
                    pos[block[j]] += rng.normal(scale=1e-6, size=2)


def optimize_layout(
    joint: JointGraph,
    params: LayoutParams,
    initial_positions: Mapping[NodeKey, tuple[float, float]] | None = None,
) -> LayoutResult:
    """Monotone accepted-step descent on the joint energy.

    Each iteration updates graph a's block, then graph b's, halving a block's
    step until its own energy terms stop increasing (20 halvings, then the
    block freezes). A block also freezes once its max displacement falls
    below the convergence tolerance. Deterministic for a given seed.
    """
    inst = _Instance(joint)
    if inst.n == 0:
        return LayoutResult(positions={}, final_energy=0.0, energy_trace=[0.0])
    if initial_positions is not None:
        pos = np.array([initial_positions[key] for key in inst.keys], dtype=np.float64).reshape(inst.n, 2)
    else:
        pos = _initial_positions(inst, params)
    _jitter_coincident(pos, inst, params)

    steps = {"a": params.step_size, "b": params.step_size}
    active = {side: bool(inst.blocks[side].size) for side in ("a", "b")}
    trace = [_total_energy(inst, pos, params)]

    for _ in range(params.max_iters):
        if not any(active.values()):
            break
        for side in ("a", "b"):
            if not active[side]:
                continue
            block = inst.blocks[side]
            grad = inst.gradient(pos, params, side=side)[block]
            base = inst.side_energy(pos, side, params)
            step = steps[side]
            accepted = None
            for _ in range(_MAX_HALVINGS + 1):
                trial = pos.copy()
                trial[block] = pos[block] - step * grad
                value = inst.side_energy(trial, side, params)
                if np.isfinite(value) and value <= base:
                    accepted = trial
                    break
                step *= 0.5
            if accepted is None:
                active[side] = False
                continue
            displacement = float(np.max(np.linalg.norm(accepted[block] - pos[block], axis=1)))
            pos = accepted
            steps[side] = step * params.step_decay
            if displacement < params.tol:
                active[side] = False
        trace.append(_total_energy(inst, pos, params))

    positions = {key: (float(pos[i, 0]), float(pos[i, 1])) for i, key in enumerate(inst.keys)}
    return LayoutResult(positions=positions, final_energy=trace[-1], energy_trace=trace)


def _total_energy(inst: _Instance, pos: np.ndarray, params: LayoutParams) -> float:
    return (
        inst.intra_energy(pos, "a", params)
        + inst.intra_energy(pos, "b", params)
        + params.alignment_strength * inst.align_energy(pos)
    )


def optimize_side(graph: MapperGraph, side: str, params: LayoutParams) -> LayoutResult:
    """Lay out a single graph alone, as the given side of a joint layout."""
    if side not in ("a", "b"):
        raise InvalidParameterError(f"side must be 'a' or 'b', got {side!r}")
    empty = MapperGraph(
        nodes=(), edges=(), params=graph.params, universe=graph.universe, uncovered=frozenset()
    )
    if side == "a":
        joint = JointGraph(graph_a=graph, graph_b=empty, inter_edges=())
    else:
        joint = JointGraph(graph_a=empty, graph_b=graph, inter_edges=())
    return optimize_layout(joint, params)


def separate_side_by_side(result: LayoutResult, margin: float) -> LayoutResult:
    """Rigid horizontal translation of graph b so the boxes sit `margin` apart."""
    xs = {side: [x for (s, _), (x, _) in result.positions.items() if s == side] for side in ("a", "b")}
    offsets = {"a": (0.0, 0.0), "b": (0.0, 0.0)}
    if xs["a"] and xs["b"]:
        dx = (max(xs["a"]) + margin) - min(xs["b"])
        offsets["b"] = (dx, 0.0)
    shifted = {
        key: (x + offsets[key[0]][0], y + offsets[key[0]][1]) for key, (x, y) in result.positions.items()
    }
    return LayoutResult(
        positions=shifted,
        final_energy=result.final_energy,
        energy_trace=list(result.energy_trace),
        offsets=offsets,
    )


def monotone_descent(
    x0: np.ndarray,
    value_fn,
    grad_fn,
    step_size: float,
    step_decay: float,
    tol: float,
    max_iters: int,
    step_growth: float = 1.5,
) -> np.ndarray:
    """Generic accepted-step descent used by the membrane layouts.

    The step halves until a move stops increasing the energy and grows again
    after acceptance, which keeps progress on the nearly-flat minima of the
    gap-length springs; `step_decay < 1` caps that growth over time.
    """
    x = np.asarray(x0, dtype=np.float64).copy()
    step = step_size
    max_step = step_size * 1024.0  # growth cap; keeps repulsion-only drift finite
    for _ in range(max_iters):
        grad = grad_fn(x)
        base = value_fn(x)
        s = step
        accepted = None
        for _ in range(_MAX_HALVINGS + 1):
            trial = x - s * grad
            value = value_fn(trial)
            if np.isfinite(value) and value <= base:
                accepted = trial
                break
            s *= 0.5
        if accepted is None:
            break
        displacement = float(np.max(np.abs(accepted - x))) if x.size else 0.0
        x = accepted
        step = min(s * step_growth, max_step) * step_decay
        if displacement < tol:
            break
    return x
