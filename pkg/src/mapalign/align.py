"""Local alignment discovery via spectral clustering of the joint graph.

Nodes of both mapper graphs are clustered together on an affinity that
weights each graph's edges and the cross-graph edges separately; every
cluster becomes an alignment pair whose two sides are the nodes it contains
from each graph. Pairs carry a content score (item Jaccard across sides) and
a structural coherence score (mean silhouette in the spectral embedding).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from .errors import InvalidParameterError
from .joint import JointGraph, jaccard
from .layout import NodeKey
from .motif import MotifLabel


@dataclass(frozen=True)
class AffinityWeights:
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    scale_inter_by_jaccard: bool = False

    def __post_init__(self):
        if min(self.alpha, self.beta, self.gamma) < 0:
            raise InvalidParameterError("affinity weights must be >= 0")
        if self.alpha == self.beta == self.gamma == 0:
            raise InvalidParameterError("at least one affinity weight must be positive")

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "scale_inter_by_jaccard": self.scale_inter_by_jaccard,
        }


@dataclass(frozen=True)
class AffinityMatrix:
    matrix: np.ndarray
    keys: tuple[NodeKey, ...]


@dataclass(frozen=True)
class SpectralEmbedding:
    keys: tuple[NodeKey, ...]
    matrix: np.ndarray  # one row per key, k columns
    eigenvalues: tuple[float, ...]  # full ascending spectrum prefix

    @property
    def vectors(self) -> dict[NodeKey, np.ndarray]:
        return {key: self.matrix[i] for i, key in enumerate(self.keys)}


@dataclass(frozen=True)
class AlignmentPair:
    id: int
    nodes_a: frozenset[int]
    nodes_b: frozenset[int]
    items_a: frozenset[str]
    items_b: frozenset[str]
    content_jaccard: float
    coherence: float
    motif: MotifLabel | None = None

    def to_json(self) -> dict:
        payload = {
            "id": self.id,
            "nodes_a": sorted(self.nodes_a),
            "nodes_b": sorted(self.nodes_b),
            "content_jaccard": self.content_jaccard,
            "coherence": self.coherence,
            "motif": self.motif.to_json() if self.motif else None,
        }
        return payload


def build_affinity(joint: JointGraph, weights: AffinityWeights) -> AffinityMatrix:
    """Symmetric zero-diagonal affinity over all nodes of both graphs."""
    keys: list[NodeKey] = [("a", n.id) for n in joint.graph_a.nodes] + [("b", n.id) for n in joint.graph_b.nodes]
    index = {key: i for i, key in enumerate(keys)}
    n = len(keys)
    w = np.zeros((n, n))
    for u, v, _ in joint.graph_a.edges:
        i, j = index[("a", u)], index[("a", v)]
        w[i, j] = w[j, i] = weights.alpha
    for u, v, _ in joint.graph_b.edges:
        i, j = index[("b", u)], index[("b", v)]
        w[i, j] = w[j, i] = weights.beta
    for edge in joint.inter_edges:
        i, j = index[("a", edge.a)], index[("b", edge.b)]
        value = weights.gamma * edge.w if weights.scale_inter_by_jaccard else weights.gamma
        w[i, j] = w[j, i] = value
    return AffinityMatrix(matrix=w, keys=tuple(keys))


def spectral_embed(affinity: AffinityMatrix, k: int) -> SpectralEmbedding:
    """Rows of the k smallest eigenvectors of the normalized Laplacian.

    L = I - D^{-1/2} W D^{-1/2}. Eigenvector signs are fixed by making each
    vector's first nonzero entry positive, so the embedding is deterministic.
    """
    w = affinity.matrix
    n = w.shape[0]
    if n == 0:
        raise InvalidParameterError("cannot embed an empty affinity")
    degrees = w.sum(axis=1)
    if np.any(degrees <= 0):
        raise InvalidParameterError("affinity contains isolated nodes; remove them first")
    if k < 1 or k > n:
        raise InvalidParameterError(f"k must be in [1, {n}], got {k}")
    inv_sqrt = 1.0 / np.sqrt(degrees)
    lap = np.eye(n) - inv_sqrt[:, None] * w * inv_sqrt[None, :]
    lap = (lap + lap.T) / 2.0
    eigenvalues, eigenvectors = np.linalg.eigh(lap)
    vectors = eigenvectors[:, :k].copy()
    for col in range(vectors.shape[1]):
        column = vectors[:, col]
        nonzero = np.flatnonzero(np.abs(column) > 1e-12)
        if nonzero.size and column[nonzero[0]] < 0:
            vectors[:, col] = -column
    return SpectralEmbedding(keys=affinity.keys, matrix=vectors, eigenvalues=tuple(float(v) for v in eigenvalues))


def choose_k(eigenvalues, k_max: int = 50, user_k: int | None = None) -> int:
    """First elbow of the ascending spectrum via the largest second difference."""
    if user_k is not None:
        return int(user_k)
    values = np.asarray(list(eigenvalues), dtype=np.float64)
    if values.shape[0] < 3:
        raise InvalidParameterError("need at least 3 eigenvalues to locate an elbow")
    m = min(k_max, values.shape[0])
    values = values[:m]
    second = values[2:] - 2.0 * values[1:-1] + values[:-2]  # index i of `second` is curve index i+1
    k = 1 + (int(np.argmax(second)) + 1)
    return int(min(max(k, 2), m))


def kmeans(embedding: SpectralEmbedding, k: int, seed: int = 0) -> dict[NodeKey, int]:
    """Seeded k-means++ then Lloyd iterations to an assignment fixpoint."""
    points = embedding.matrix
    n = points.shape[0]
    if k > n:
        raise InvalidParameterError(f"k={k} exceeds number of embedded nodes {n}")
    rng = np.random.default_rng(np.random.SeedSequence([seed, n, k]))
    centers = _kmeans_pp(points, k, rng)
    assignment = np.full(n, -1, dtype=np.int64)
    for _ in range(300):
        dist2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_assignment = np.argmin(dist2, axis=1)
        for c in range(k):
            mask = new_assignment == c
            if mask.any():
                centers[c] = points[mask].mean(axis=0)
            else:
                # re-seed an empty cluster from the point farthest from its center
                farthest = int(np.argmax(dist2[np.arange(n), new_assignment]))
                centers[c] = points[farthest]
                new_assignment[farthest] = c
        if np.array_equal(new_assignment, assignment):
            break
        assignment = new_assignment
    return {key: int(assignment[i]) for i, key in enumerate(embedding.keys)}


def _kmeans_pp(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centers = [points[int(rng.integers(n))]]
    for _ in range(1, k):
        dist2 = np.min(((points[:, None, :] - np.array(centers)[None, :, :]) ** 2).sum(axis=2), axis=1)
        total = dist2.sum()
        if total <= 0:
            centers.append(points[int(rng.integers(n))])
            continue
        centers.append(points[int(rng.choice(n, p=dist2 / total))])
    return np.array(centers, dtype=np.float64)


def silhouette_scores(points: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Per-point silhouette (b - a) / max(a, b); singletons score 0."""
    n = points.shape[0]
    labels = np.asarray(labels)
    unique = np.unique(labels)
    diffs = points[:, None, :] - points[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diffs, diffs))
    scores = np.zeros(n)
    if unique.shape[0] < 2:
        return scores
    for i in range(n):
        own = labels[i]
        own_mask = labels == own
        own_count = int(own_mask.sum())
        if own_count <= 1:
            continue
        a = dist[i, own_mask].sum() / (own_count - 1)
        b = min(dist[i, labels == other].mean() for other in unique if other != own)
        scores[i] = (b - a) / max(a, b)
    return scores


def score_pair(
    pair: AlignmentPair,
    joint: JointGraph,
    embedding: SpectralEmbedding | None,
    assignment: Mapping[NodeKey, int] | None = None,
) -> tuple[float, float]:
    """(content jaccard across sides, mean silhouette of the pair's nodes)."""
    if not pair.items_a or not pair.items_b:
        content = 0.0
    else:
        content = jaccard(pair.items_a, pair.items_b)
    if embedding is None or assignment is None:
        return content, 0.0
    keys = [k for k in embedding.keys if k in assignment]
    labels = np.array([assignment[k] for k in keys])
    points = np.array([embedding.vectors[k] for k in keys])
    scores = silhouette_scores(points, labels)
    pair_keys = {("a", nid) for nid in pair.nodes_a} | {("b", nid) for nid in pair.nodes_b}
    mask = np.array([k in pair_keys for k in keys])
    coherence = float(scores[mask].mean()) if mask.any() else 0.0
    return content, coherence


def node_items(joint: JointGraph, side: str, node_ids) -> frozenset[str]:
    graph = joint.graph_a if side == "a" else joint.graph_b
    items: set[str] = set()
    for nid in node_ids:
        items |= graph.nodes[nid].members
    return frozenset(items)


@dataclass(frozen=True)
class DiscoveryResult:
    pairs: tuple[AlignmentPair, ...]
    eigenvalues: tuple[float, ...]
    embedding: SpectralEmbedding | None
    assignment: dict[NodeKey, int]


def discover_alignments(
    joint: JointGraph,
    weights: AffinityWeights = AffinityWeights(),
    k: int | None = None,
    seed: int = 0,
) -> DiscoveryResult:
    """Full discovery pipeline over the joint graph.

    Isolated nodes of the affinity become singleton pairs up front; the rest
    are embedded, clustered, split per graph, and scored. Pairs are sorted by
    content jaccard descending and re-numbered. The eigenvalue spectrum rides
    along for elbow display.
    """
    affinity = build_affinity(joint, weights)
    if not affinity.keys:
        return DiscoveryResult(pairs=(), eigenvalues=(), embedding=None, assignment={})
    degrees = affinity.matrix.sum(axis=1)
    isolated = [key for i, key in enumerate(affinity.keys) if degrees[i] <= 0]
    connected_idx = [i for i, key in enumerate(affinity.keys) if degrees[i] > 0]

    raw_pairs: list[tuple[frozenset[int], frozenset[int]]] = []
    embedding = None
    assignment: dict[NodeKey, int] = {}
    eigenvalues: tuple[float, ...] = ()
    if connected_idx:
        sub = AffinityMatrix(
            matrix=affinity.matrix[np.ix_(connected_idx, connected_idx)],
            keys=tuple(affinity.keys[i] for i in connected_idx),
        )
        m = len(connected_idx)
        if m == 1:
            isolated.append(sub.keys[0])
        else:
            embedding = spectral_embed(sub, k=min(50, m))
            eigenvalues = embedding.eigenvalues
            if k is not None:
                chosen = min(max(int(k), 1), m)
            elif m < 3:
                chosen = m
            else:
                chosen = choose_k(eigenvalues, k_max=50)
            embedding = SpectralEmbedding(
                keys=embedding.keys, matrix=embedding.matrix[:, :chosen], eigenvalues=eigenvalues
            )
            assignment = kmeans(embedding, chosen, seed=seed)
            for cluster in range(chosen):
                members = [key for key, c in assignment.items() if c == cluster]
                if not members:
                    continue
                nodes_a = frozenset(nid for side, nid in members if side == "a")
                nodes_b = frozenset(nid for side, nid in members if side == "b")
                raw_pairs.append((nodes_a, nodes_b))
    for side, nid in isolated:
        if side == "a":
            raw_pairs.append((frozenset([nid]), frozenset()))
        else:
            raw_pairs.append((frozenset(), frozenset([nid])))

    pairs: list[AlignmentPair] = []
    for nodes_a, nodes_b in raw_pairs:
        if not nodes_a and not nodes_b:
            continue
        draft = AlignmentPair(
            id=-1,
            nodes_a=nodes_a,
            nodes_b=nodes_b,
            items_a=node_items(joint, "a", nodes_a),
            items_b=node_items(joint, "b", nodes_b),
            content_jaccard=0.0,
            coherence=0.0,
        )
        in_embedding = bool(assignment) and (
            all(("a", nid) in assignment for nid in nodes_a) and all(("b", nid) in assignment for nid in nodes_b)
        )
        content, coherence = score_pair(
            draft, joint, embedding if in_embedding else None, assignment if in_embedding else None
        )
        pairs.append(replace(draft, content_jaccard=content, coherence=coherence))

    pairs.sort(key=lambda p: (-p.content_jaccard, sorted(p.nodes_a), sorted(p.nodes_b)))
    numbered = tuple(replace(pair, id=i) for i, pair in enumerate(pairs))
    return DiscoveryResult(pairs=numbered, eigenvalues=eigenvalues, embedding=embedding, assignment=assignment)
