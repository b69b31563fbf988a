"""Two-layer membrane layout for a merged alignment pair.

Side-a supernodes sit on the y=0 layer and side-b supernodes on y=gap; only
the x coordinates are optimized, balancing 1D in-layer repulsion against
cross edges preferring a length equal to the layer gap. Each supernode also
gets a local force-directed layout of its constituents, rescaled into an
oval whose radius grows with the square root of its member count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import InvalidParameterError
from .layout import monotone_descent
from .merge import Supernode

_COINCIDENT = 1e-12


@dataclass(frozen=True)
class MembraneLayout:
    gap: float
    supernode_positions: dict[int, tuple[float, float]]
    internal_layouts: dict[int, dict[int, tuple[float, float]]]
    oval_radii: dict[int, float]

    def to_json(self) -> dict:
        return {
            "gap": self.gap,
            "supernode_positions": {str(k): list(v) for k, v in sorted(self.supernode_positions.items())},
            "internal_layouts": {
                str(k): {str(n): list(p) for n, p in sorted(layout.items())}
                for k, layout in sorted(self.internal_layouts.items())
            },
            "oval_radii": {str(k): r for k, r in sorted(self.oval_radii.items())},
        }


def membrane_energy(
    x: np.ndarray,
    layer: np.ndarray,
    inter: list[tuple[int, int, float]],
    gap: float,
    repulsion: float,
) -> float:
    """1D in-layer repulsion plus cross-edge springs preferring length `gap`.

    `x` holds all supernode x coordinates; `layer` is 0/1 per entry; `inter`
    lists (index, index, weight) cross edges.
    """
    total = 0.0
    for side in (0, 1):
        xs = x[layer == side]
        if xs.shape[0] > 1:
            diff = np.abs(xs[:, None] - xs[None, :])
            np.fill_diagonal(diff, np.inf)
            if float(diff.min()) < _COINCIDENT:
                return float("inf")
            total += float(np.sum(repulsion / diff))  # ordered pairs
    for i, j, w in inter:
        d = float(np.hypot(x[i] - x[j], gap))
        total += w * (d - gap) ** 2
    return total


def membrane_gradient(
    x: np.ndarray,
    layer: np.ndarray,
    inter: list[tuple[int, int, float]],
    gap: float,
    repulsion: float,
) -> np.ndarray:
    grad = np.zeros_like(x)
    for side in (0, 1):
        idx = np.flatnonzero(layer == side)
        if idx.shape[0] > 1:
            xs = x[idx]
            diff = xs[:, None] - xs[None, :]
            dist = np.abs(diff)
            np.fill_diagonal(dist, np.inf)
            dist = np.maximum(dist, _COINCIDENT)
            grad[idx] += np.sum(-2.0 * repulsion * np.sign(diff) / dist**2, axis=1)
    for i, j, w in inter:
        dx = x[i] - x[j]
        d = float(np.hypot(dx, gap))
        coef = 2.0 * w * (d - gap) * dx / d
        grad[i] += coef
        grad[j] -= coef
    return grad


def membrane_layout(
    supernodes: "Mapping[int, Supernode] | list[Supernode]",
    weights: Mapping[tuple[int, int], float],
    gap: float,
    seed: int = 0,
    global_positions: Mapping[tuple[str, int], tuple[float, float]] | None = None,
    repulsion: float = 0.05,
    radius_scale: float = 0.08,
    step_size: float = 0.05,
    step_decay: float = 0.99,
    max_iters: int = 500,
) -> MembraneLayout:
    """Optimize supernode x positions on two fixed layers.

    When the pair's global layout is available, each supernode starts at the
    mean x of its constituents there, which keeps the membrane view aligned
    with the overview.
    """
    if gap <= 0:
        raise InvalidParameterError("gap must be positive")
    nodes = list(supernodes.values()) if isinstance(supernodes, Mapping) else list(supernodes)
    nodes.sort(key=lambda s: s.id)
    index = {s.id: i for i, s in enumerate(nodes)}
    layer = np.array([0 if s.side == "a" else 1 for s in nodes], dtype=np.int64)
    inter = [(index[a], index[b], w) for (a, b), w in sorted(weights.items())]

    rng = np.random.default_rng(np.random.SeedSequence([seed, len(nodes)]))
    x = np.zeros(len(nodes))
    spread = max(1.0, len(nodes) * gap * 0.5)
    for i, sn in enumerate(nodes):
        anchor = None
        if global_positions is not None:
            xs = [global_positions[(sn.side, nid)][0] for nid in sn.constituents if (sn.side, nid) in global_positions]
            if xs:
                anchor = float(np.mean(xs))
        x[i] = anchor if anchor is not None else float(rng.uniform(0.0, spread))
    if global_positions is None:
        # barycentric pass: start each a-supernode over its b-neighbors so
        # matched supernodes do not begin on the wrong side of a repulsion
        # barrier (1D nodes cannot cross once optimization starts)
        for i, sn in enumerate(nodes):
            if sn.side != "a":
                continue
            incident = [(index[b], w) for (a, b), w in weights.items() if a == sn.id]
            if incident:
                total = sum(w for _, w in incident)
                if total > 0:
                    x[i] = sum(x[j] * w for j, w in incident) / total
    # nudge coincident x apart so the 1/d repulsion is defined
    for side in (0, 1):
        idx = np.flatnonzero(layer == side)
        for _ in range(100):
            diff = np.abs(x[idx][:, None] - x[idx][None, :])
            np.fill_diagonal(diff, np.inf)
            clashes = np.argwhere(diff < _COINCIDENT)
            if not clashes.size:
                break
            for i, j in clashes:
                if i < j:
                    x[idx[j]] += rng.normal(scale=1e-6 * gap)

    if len(nodes) > 1:
        x = monotone_descent(
            x,
            lambda xs: membrane_energy(xs, layer, inter, gap, repulsion),
            lambda xs: membrane_gradient(xs, layer, inter, gap, repulsion),
            step_size=step_size,
            step_decay=step_decay,
            tol=1e-5 * gap,
            max_iters=max_iters,
        )

    positions = {s.id: (float(x[i]), 0.0 if s.side == "a" else gap) for i, s in enumerate(nodes)}
    radii = {s.id: oval_radius(len(s.members), radius_scale) for s in nodes}
    internal = {s.id: internal_layout(s, seed=seed, radius=radii[s.id]) for s in nodes}
    return MembraneLayout(gap=gap, supernode_positions=positions, internal_layouts=internal, oval_radii=radii)


def oval_radius(member_count: int, radius_scale: float = 0.08) -> float:
    return radius_scale * float(np.sqrt(max(member_count, 1)))


def internal_layout(supernode: Supernode, seed: int = 0, radius: float | None = None) -> dict[int, tuple[float, float]]:
    """Local force-directed layout of constituents, rescaled into the oval."""
    if radius is None:
        radius = oval_radius(len(supernode.members))
    nodes = sorted(supernode.constituents)
    if len(nodes) == 1:
        return {nodes[0]: (0.0, 0.0)}
    index = {nid: i for i, nid in enumerate(nodes)}
    edges = np.array(
        [(index[u], index[v]) for u, v in supernode.internal_edges if u in index and v in index], dtype=np.int64
    ).reshape(-1, 2)
    n = len(nodes)
    rng = np.random.default_rng(np.random.SeedSequence([seed, supernode.id, n]))
    pos = rng.uniform(0.0, 1.0, size=(n, 2))

    length, repulsion = 1.0, 0.05

    def value(flat: np.ndarray) -> float:
        p = flat.reshape(n, 2)
        total = 0.0
        if edges.shape[0]:
            d = np.linalg.norm(p[edges[:, 0]] - p[edges[:, 1]], axis=1)
            total += float(np.sum((d - length) ** 2))
        diff = p[:, None, :] - p[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        np.fill_diagonal(dist, np.inf)
        if float(dist.min()) < _COINCIDENT:
            return float("inf")
        return total + float(np.sum(repulsion / dist))

    def grad(flat: np.ndarray) -> np.ndarray:
        p = flat.reshape(n, 2)
        g = np.zeros_like(p)
        if edges.shape[0]:
            u, v = edges[:, 0], edges[:, 1]
            delta = p[u] - p[v]
            d = np.maximum(np.linalg.norm(delta, axis=1), _COINCIDENT)
            contrib = (2.0 * (d - length) / d)[:, None] * delta
            np.add.at(g, u, contrib)
            np.add.at(g, v, -contrib)
        diff = p[:, None, :] - p[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        np.fill_diagonal(dist, np.inf)
        dist = np.maximum(dist, _COINCIDENT)
        g += np.einsum("ij,ijk->ik", -2.0 * repulsion / dist**3, diff)
        return g.ravel()

    flat = monotone_descent(pos.ravel(), value, grad, step_size=0.05, step_decay=0.99, tol=1e-5, max_iters=500)
    p = flat.reshape(n, 2)
    p = p - p.mean(axis=0)
    max_norm = float(np.linalg.norm(p, axis=1).max())
    if max_norm > 0:
        p = p * (radius / max_norm)
    return {nid: (float(p[i, 0]), float(p[i, 1])) for nid, i in index.items()}
