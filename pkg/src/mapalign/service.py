"""Session-oriented HTTP/JSON API over the full comparison pipeline.

Sessions are content-addressed (the id hashes the input data and parameters,
so re-posting identical inputs is idempotent) and held in memory, with
optional directory persistence of the reproducible inputs. Derived artifacts
are cached per parameter snapshot: changing the alignment strength keeps the
discovered alignments, changing affinity weights keeps the layouts.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import httpx
import numpy as np
from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse

from . import __version__
from .align import AffinityWeights, AlignmentPair, discover_alignments, node_items, silhouette_scores
from .bubbles import bubble_set, bubbles_json
from .errors import InvalidParameterError, MapAlignError, SummarizerError, UnknownSelectorError
from .ingest import RepresentationSet, intersect_items, load_representation_set, project_2d
from .joint import JointGraph, build_joint, jaccard
from .layout import LayoutParams, LayoutResult, optimize_layout, separate_side_by_side
from .mapper import MapperGraph, MapperParams, build_mapper
from .membrane import membrane_layout
from .merge import MergeSequence, greedy_merge, inter_edge_weights, state_at
from .motif import DEFAULT_TAU, classify_pair

SUMMARIZER_URL_ENV = "MAPALIGN_SUMMARIZER_URL"
SUMMARIZER_KEY_ENV = "MAPALIGN_SUMMARIZER_KEY"

_STOPWORDS = frozenset(
    "a an and are as at be but by for from has have in is it its of on or that the this to was were will with".split()
)

DEFAULT_NODE_RADIUS = 0.05
DEFAULT_MARGIN = 1.0


class SessionNotFound(MapAlignError):
    code = "unknown-session"


class UnknownPairError(MapAlignError):
    code = "unknown-pair"


class LayoutNotComputedError(MapAlignError):
    code = "layout-not-computed"


@dataclass
class Session:
    id: str
    seed: int
    set_a: RepresentationSet
    set_b: RepresentationSet
    mapper_params: tuple[MapperParams, MapperParams]
    mappers: tuple[MapperGraph, MapperGraph]
    joint: JointGraph
    layout_params: LayoutParams
    projections: dict[str, dict[str, tuple[float, float]]]
    warnings: list[str] = field(default_factory=list)
    current_lambda: float = 1.0
    layouts: dict[float, LayoutResult] = field(default_factory=dict)  # raw, pre-separation
    weights: AffinityWeights = field(default_factory=AffinityWeights)
    user_k: int | None = None
    motif_tau: float = DEFAULT_TAU
    alignments: list[AlignmentPair] | None = None
    eigenvalues: tuple[float, ...] = ()
    embedding: Any = None
    assignment: dict | None = None
    merge_cache: dict[tuple[int, str], MergeSequence] = field(default_factory=dict)
    bubble_cache: dict[tuple[float, int], list[dict]] = field(default_factory=dict)
    alignment_version: int = 0
    lock: threading.RLock = field(default_factory=threading.RLock)

    def layout_result(self, lam: float | None = None) -> LayoutResult:
        lam = self.current_lambda if lam is None else lam
        if lam not in self.layouts:
            raise LayoutNotComputedError(
                f"no layout cached for alignment strength {lam}; set it via PUT .../lambda first"
            )
        return self.layouts[lam]


def _digest_set(rset: RepresentationSet) -> str:
    h = hashlib.sha256()
    h.update(rset.name.encode())
    h.update("\x00".join(rset.items).encode())
    h.update(rset.matrix.tobytes())
    h.update(json.dumps(rset.labels or {}, sort_keys=True).encode())
    h.update(json.dumps(rset.meta or {}, sort_keys=True).encode())
    h.update(json.dumps(rset.numeric_attrs or {}, sort_keys=True).encode())
    return h.hexdigest()


def _mapper_params_from_json(payload: dict | None, base: MapperParams | None = None) -> MapperParams:
    base = base or MapperParams()
    if not payload:
        return base
    known = {"filter", "num_intervals", "overlap", "dbscan_min_pts", "dbscan_eps"}
    unknown = set(payload) - known
    if unknown:
        raise InvalidParameterError(f"unknown mapper parameter(s): {sorted(unknown)}")
    merged = {**base.to_json(), **payload}
    merged.pop("resolved_eps", None)
    return MapperParams(**merged)


def _layout_params_from_json(payload: dict | None, seed: int) -> LayoutParams:
    base = LayoutParams(seed=seed)
    if not payload:
        return base
    known = {
        "alignment_strength",
        "preferred_edge_length",
        "repulsion",
        "max_iters",
        "step_size",
        "step_decay",
        "convergence_tol",
        "seed",
    }
    unknown = set(payload) - known
    if unknown:
        raise InvalidParameterError(f"unknown layout parameter(s): {sorted(unknown)}")
    merged = {**base.to_json(), **payload}
    return LayoutParams(**merged)


class SessionStore:
    def __init__(self, persist_dir: str | Path | None = None):
        self.sessions: dict[str, Session] = {}
        self.lock = threading.Lock()
        self.persist_dir = Path(persist_dir) if persist_dir else None
        if self.persist_dir:
            self.persist_dir.mkdir(parents=True, exist_ok=True)
            self._restore()

    def get(self, session_id: str) -> Session:
        with self.lock:
            session = self.sessions.get(session_id)
        if session is None:
            raise SessionNotFound(f"no session {session_id!r}")
        return session

    def create(self, body: dict) -> Session:
        known = {"manifest_a", "manifest_b", "mapper_params", "mapper_params_b", "layout_params", "seed"}
        unknown = set(body) - known
        if unknown:
            raise InvalidParameterError(f"unknown session field(s): {sorted(unknown)}")
        for key in ("manifest_a", "manifest_b"):
            if key not in body:
                raise InvalidParameterError(f"missing required field {key!r}")
        seed = int(body.get("seed", 0))
        raw_a = load_representation_set(body["manifest_a"])
        raw_b = load_representation_set(body["manifest_b"])
        session_input = intersect_items(raw_a, raw_b)
        set_a = raw_a.subset(session_input.shared_items)
        set_b = raw_b.subset(session_input.shared_items)

        params_a = _mapper_params_from_json(body.get("mapper_params"))
        warnings: list[str] = []
        if body.get("mapper_params_b"):
            params_b = _mapper_params_from_json(body.get("mapper_params_b"), base=params_a)
            if params_b != params_a:
                warnings.append(
                    "per-side mapper parameters differ; comparable resolution is only guaranteed "
                    "with identical configurations"
                )
        else:
            params_b = params_a
        layout_params = _layout_params_from_json(body.get("layout_params"), seed=seed)

        graph_a = build_mapper(set_a, params_a)
        graph_b = build_mapper(set_b, params_b)
        joint = build_joint(graph_a, graph_b)

        fingerprint = hashlib.sha256(
            json.dumps(
                {
                    "a": _digest_set(raw_a),
                    "b": _digest_set(raw_b),
                    "mapper_a": params_a.to_json(),
                    "mapper_b": params_b.to_json(),
                    "layout": layout_params.to_json(),
                    "seed": seed,
                },
                sort_keys=True,
            ).encode()
        ).hexdigest()[:16]

        with self.lock:
            if fingerprint in self.sessions:
                return self.sessions[fingerprint]

        session = Session(
            id=fingerprint,
            seed=seed,
            set_a=set_a,
            set_b=set_b,
            mapper_params=(params_a, params_b),
            mappers=(graph_a, graph_b),
            joint=joint,
            layout_params=layout_params,
            projections={"a": project_2d(set_a), "b": project_2d(set_b)},
            warnings=warnings,
            current_lambda=layout_params.alignment_strength,
        )
        session.layouts[layout_params.alignment_strength] = optimize_layout(joint, layout_params)
        with self.lock:
            self.sessions.setdefault(fingerprint, session)
            session = self.sessions[fingerprint]
        self._persist(session, body)
        return session

    def _persist(self, session: Session, body: dict) -> None:
        if not self.persist_dir:
            return
        record = {
            "body": {
                **body,
                "manifest_a": str(Path(body["manifest_a"]).resolve()),
                "manifest_b": str(Path(body["manifest_b"]).resolve()),
            }
        }
        (self.persist_dir / f"{session.id}.json").write_text(json.dumps(record, indent=2), encoding="utf-8")

    def _restore(self) -> None:
        for bundle in sorted(self.persist_dir.glob("*.json")):
            try:
                record = json.loads(bundle.read_text(encoding="utf-8"))
                self.create(record["body"])
            except Exception:
                continue  # stale bundle (moved inputs); skip rather than fail startup


def _ensure_alignments(session: Session) -> None:
    if session.alignments is not None:
        return
    result = discover_alignments(session.joint, session.weights, k=session.user_k, seed=session.seed)
    session.alignments = [replace(p, motif=classify_pair(p, session.joint, session.motif_tau)) for p in result.pairs]
    session.eigenvalues = result.eigenvalues
    session.embedding = result.embedding
    session.assignment = result.assignment
    session.alignment_version += 1
    session.merge_cache.clear()
    session.bubble_cache.clear()


def _pair_or_404(session: Session, pair_id: int) -> AlignmentPair:
    _ensure_alignments(session)
    for pair in session.alignments:
        if pair.id == pair_id:
            return pair
    raise UnknownPairError(f"no alignment pair {pair_id}")


def _bubbles_payload(session: Session) -> list[dict]:
    key = (session.current_lambda, session.alignment_version)
    if key not in session.bubble_cache:
        layout = separate_side_by_side(session.layout_result(), DEFAULT_MARGIN)
        per_pair = {p.id: bubble_set(p, layout, node_radius=DEFAULT_NODE_RADIUS) for p in session.alignments}
        session.bubble_cache[key] = bubbles_json(per_pair)
    return session.bubble_cache[key]


def _item_entry(session: Session, item: str) -> dict:
    labels = session.set_a.labels or {}
    labels_b = session.set_b.labels or {}
    meta = session.set_a.meta or {}
    meta_b = session.set_b.meta or {}
    return {
        "id": item,
        "label": labels.get(item, labels_b.get(item)),
        "text": meta.get(item, meta_b.get(item)),
    }


def _grouped_items(session: Session, shared, only_a, only_b) -> dict:
    return {
        "shared": [_item_entry(session, i) for i in sorted(shared)],
        "only_a": [_item_entry(session, i) for i in sorted(only_a)],
        "only_b": [_item_entry(session, i) for i in sorted(only_b)],
    }


def _items_for_selector(session: Session, selector: str) -> dict:
    parts = selector.split(":")
    if parts[0] == "pair" and len(parts) == 2:
        pair = _pair_or_404(session, int(parts[1]))
        shared = pair.items_a & pair.items_b
        return _grouped_items(session, shared, pair.items_a - shared, pair.items_b - shared)
    if parts[0] == "node" and len(parts) == 3:
        side, node_id = parts[1], int(parts[2])
        if side not in ("a", "b"):
            raise UnknownSelectorError(f"bad side {side!r} in selector {selector!r}")
        graph = session.joint.graph_a if side == "a" else session.joint.graph_b
        other = session.joint.graph_b if side == "a" else session.joint.graph_a
        if node_id < 0 or node_id >= len(graph.nodes):
            raise UnknownSelectorError(f"no node {node_id} on side {side}")
        members = graph.nodes[node_id].members
        covered_other = frozenset().union(*[n.members for n in other.nodes]) if other.nodes else frozenset()
        shared = members & covered_other
        only = members - shared
        return _grouped_items(session, shared, only if side == "a" else (), only if side == "b" else ())
    if parts[0] == "inter" and len(parts) == 3:
        a_id, b_id = int(parts[1]), int(parts[2])
        for edge in session.joint.inter_edges:
            if edge.a == a_id and edge.b == b_id:
                members_a = session.joint.graph_a.nodes[a_id].members
                members_b = session.joint.graph_b.nodes[b_id].members
                return _grouped_items(session, edge.shared, members_a - edge.shared, members_b - edge.shared)
        raise UnknownSelectorError(f"no inter-edge between a:{a_id} and b:{b_id}")
    raise UnknownSelectorError(f"unsupported selector {selector!r}; use pair:<id>, node:<side>:<id>, inter:<a>:<b>")


def _extractive_summary(texts: list[str]) -> str:
    counts: dict[str, int] = {}
    for text in texts:
        for token in text.lower().split():
            word = "".join(ch for ch in token if ch.isalpha())
            if len(word) > 2 and word not in _STOPWORDS:
                counts[word] = counts.get(word, 0) + 1
    top = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:5]
    return " ".join(word for word, _ in top)


def _post_summarizer(url: str, key: str | None, texts: list[str]) -> str:
    headers = {"Authorization": f"Bearer {key}"} if key else {}
    try:
        response = httpx.post(url, json={"input": texts}, headers=headers, timeout=30.0)
        response.raise_for_status()
        return str(response.json()["text"])
    except Exception as exc:  # noqa: BLE001 - surfaced as a structured upstream error
        raise SummarizerError(f"summarizer request failed: {exc}") from exc


def _summarize(session: Session, item_ids: list[str]) -> dict:
    meta = {**(session.set_b.meta or {}), **(session.set_a.meta or {})}
    texts = [meta[i] for i in item_ids if i in meta]
    if not texts:
        return {"summary": "", "source": "fallback"}
    url = os.environ.get(SUMMARIZER_URL_ENV)
    if url:
        return {"summary": _post_summarizer(url, os.environ.get(SUMMARIZER_KEY_ENV), texts), "source": "external"}
    return {"summary": _extractive_summary(texts), "source": "fallback"}


def _manual_pair(session: Session, side: str, node_ids: list[int]) -> dict:
    if side not in ("a", "b"):
        raise InvalidParameterError(f"side must be 'a' or 'b', got {side!r}")
    graph = session.joint.graph_a if side == "a" else session.joint.graph_b
    for nid in node_ids:
        if nid < 0 or nid >= len(graph.nodes):
            raise InvalidParameterError(f"no node {nid} on side {side}")
    selected = frozenset(node_ids)
    counterpart: set[int] = set()
    for edge in session.joint.inter_edges:
        if side == "a" and edge.a in selected:
            counterpart.add(edge.b)
        elif side == "b" and edge.b in selected:
            counterpart.add(edge.a)
    nodes_a = selected if side == "a" else frozenset(counterpart)
    nodes_b = frozenset(counterpart) if side == "a" else selected
    items_a = node_items(session.joint, "a", nodes_a)
    items_b = node_items(session.joint, "b", nodes_b)
    content = jaccard(items_a, items_b) if items_a and items_b else 0.0
    coherence = _manual_coherence(session, nodes_a, nodes_b)
    pair = AlignmentPair(
        id=-1,
        nodes_a=nodes_a,
        nodes_b=nodes_b,
        items_a=items_a,
        items_b=items_b,
        content_jaccard=content,
        coherence=coherence,
    )
    motif = classify_pair(pair, session.joint, session.motif_tau)
    payload = replace(pair, motif=motif).to_json()
    payload["id"] = None
    payload["manual"] = True
    return payload


def _manual_coherence(session: Session, nodes_a: frozenset[int], nodes_b: frozenset[int]) -> float:
    _ensure_alignments(session)
    if session.embedding is None or not session.assignment:
        return 0.0
    manual_keys = {("a", n) for n in nodes_a} | {("b", n) for n in nodes_b}
    keys = [k for k in session.embedding.keys if k in session.assignment]
    if not any(k in manual_keys for k in keys):
        return 0.0
    new_cluster = max(session.assignment.values()) + 1
    labels = np.array([new_cluster if k in manual_keys else session.assignment[k] for k in keys])
    points = np.array([session.embedding.vectors[k] for k in keys])
    scores = silhouette_scores(points, labels)
    mask = np.array([k in manual_keys for k in keys])
    return float(scores[mask].mean())


def create_app(persist_dir: str | Path | None = None, default_config: dict | None = None) -> FastAPI:
    """Build the API app; `default_config` may pre-create a session at startup."""
    store = SessionStore(persist_dir=persist_dir)
    app = FastAPI(title="mapalign", version=__version__)
    app.state.store = store

    @app.exception_handler(MapAlignError)
    async def _mapalign_error(_request: Request, exc: MapAlignError):
        status = 404 if isinstance(exc, (SessionNotFound, UnknownPairError)) else 422
        if isinstance(exc, SummarizerError):
            status = 502
        return JSONResponse(status_code=status, content=exc.to_payload())

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/sessions")
    def create_session(body: dict):
        session = store.create(body)
        with session.lock:
            return _session_summary(session)

    @app.get("/sessions/default")
    def get_default_session():
        default = getattr(app.state, "default_session_id", None)
        if not default:
            raise SessionNotFound("no default session configured; pass --config to `mapalign serve`")
        session = store.get(default)
        with session.lock:
            return _session_summary(session)

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        session = store.get(sid)
        with session.lock:
            return _session_summary(session)

    @app.get("/sessions/{sid}/mappers")
    def get_mappers(sid: str):
        session = store.get(sid)
        with session.lock:
            return {
                "a": session.mappers[0].to_json(),
                "b": session.mappers[1].to_json(),
                "inter_edges": session.joint.inter_json()["inter_edges"],
                "uncovered": {
                    "a": sorted(session.mappers[0].uncovered),
                    "b": sorted(session.mappers[1].uncovered),
                },
            }

    @app.put("/sessions/{sid}/lambda")
    def set_lambda(sid: str, body: dict):
        session = store.get(sid)
        if "lambda" not in body:
            raise InvalidParameterError("body must contain 'lambda'")
        lam = float(body["lambda"])
        if lam < 0:
            raise InvalidParameterError(f"lambda must be >= 0, got {lam}")
        with session.lock:
            if lam not in session.layouts:
                warm = session.layouts[session.current_lambda].positions
                params = replace(session.layout_params, alignment_strength=lam)
                session.layouts[lam] = optimize_layout(session.joint, params, initial_positions=warm)
            session.current_lambda = lam
            return _layout_payload(session, lam)

    @app.get("/sessions/{sid}/layout")
    def get_layout(sid: str, strength: float | None = Query(None, alias="lambda")):
        session = store.get(sid)
        with session.lock:
            lam = session.current_lambda if strength is None else float(strength)
            session.layout_result(lam)  # raises if not cached
            return _layout_payload(session, lam)

    @app.put("/sessions/{sid}/alignment-params")
    def set_alignment_params(sid: str, body: dict):
        session = store.get(sid)
        known = {"alpha", "beta", "gamma", "scale_inter_by_jaccard", "k", "tau"}
        unknown = set(body) - known
        if unknown:
            raise InvalidParameterError(f"unknown alignment parameter(s): {sorted(unknown)}")
        with session.lock:
            current = session.weights.to_json()
            for key in ("alpha", "beta", "gamma", "scale_inter_by_jaccard"):
                if key in body:
                    current[key] = body[key]
            session.weights = AffinityWeights(**current)
            if "k" in body:
                session.user_k = None if body["k"] is None else int(body["k"])
            if "tau" in body:
                session.motif_tau = float(body["tau"])
            session.alignments = None
            _ensure_alignments(session)
            return _alignments_payload(session)

    @app.get("/sessions/{sid}/alignments")
    def get_alignments(sid: str):
        session = store.get(sid)
        with session.lock:
            _ensure_alignments(session)
            return _alignments_payload(session)

    @app.get("/sessions/{sid}/alignments/{pid}/merge")
    def get_merge(sid: str, pid: int, strategy: str = "conditional", step: int | None = None):
        session = store.get(sid)
        with session.lock:
            pair = _pair_or_404(session, pid)
            key = (pid, strategy)
            if key not in session.merge_cache:
                session.merge_cache[key] = greedy_merge(pair, session.joint, strategy=strategy)
            sequence = session.merge_cache[key]
            at = len(sequence.steps) if step is None else int(step)
            state = state_at(sequence, at)  # validates the step range
            layout = session.layout_result()
            membrane = membrane_layout(
                state,
                inter_edge_weights(state),
                gap=1.0,
                seed=session.seed,
                global_positions=layout.positions,
            )
            return {
                "pair_id": pid,
                "seed": session.seed,
                "sequence": sequence.to_json(),
                "initial_H": sequence.initial_h,
                "step": at,
                "state": [state[k].to_json() for k in sorted(state)],
                "membrane": membrane.to_json(),
            }

    @app.get("/sessions/{sid}/items")
    def get_items(sid: str, selector: str):
        session = store.get(sid)
        with session.lock:
            return {"selector": selector, **_items_for_selector(session, selector)}

    @app.post("/sessions/{sid}/summarize")
    def summarize(sid: str, body: dict):
        session = store.get(sid)
        items = body.get("items", [])
        if not isinstance(items, list):
            raise InvalidParameterError("'items' must be a list of item ids")
        with session.lock:
            return _summarize(session, items)

    @app.post("/sessions/{sid}/manual-pair")
    def manual_pair(sid: str, body: dict):
        session = store.get(sid)
        if "side" not in body or "nodes" not in body:
            raise InvalidParameterError("body must contain 'side' and 'nodes'")
        with session.lock:
            return _manual_pair(session, body["side"], [int(n) for n in body["nodes"]])

    @app.get("/sessions/{sid}/projection")
    def get_projection(sid: str):
        session = store.get(sid)
        with session.lock:
            labels = {**(session.set_b.labels or {}), **(session.set_a.labels or {})}
            attrs: dict[str, dict[str, float]] = {}
            for rset in (session.set_b, session.set_a):
                for name, per_item in (rset.numeric_attrs or {}).items():
                    attrs.setdefault(name, {}).update(per_item)
            return {
                **{
                    side: {item: [x, y] for item, (x, y) in sorted(session.projections[side].items())}
                    for side in ("a", "b")
                },
                "labels": {item: labels[item] for item in sorted(labels)},
                "numeric_attrs": {name: dict(sorted(attrs[name].items())) for name in sorted(attrs)},
            }

    if default_config:
        session = store.create(default_config)
        app.state.default_session_id = session.id

    return app


def _session_summary(session: Session) -> dict:
    params_a, params_b = session.mapper_params
    graph_a, graph_b = session.mappers
    payload_a = params_a.to_json()
    payload_a["resolved_eps"] = graph_a.resolved_eps
    payload_b = params_b.to_json()
    payload_b["resolved_eps"] = graph_b.resolved_eps
    return {
        "id": session.id,
        "seed": session.seed,
        "warnings": session.warnings,
        "n_shared": len(session.set_a.items),
        "sets": {"a": session.set_a.name, "b": session.set_b.name},
        "mapper_params": {"a": payload_a, "b": payload_b},
        "layout_params": session.layout_params.to_json(),
        "graph_sizes": {
            "a": {"nodes": len(graph_a.nodes), "edges": len(graph_a.edges)},
            "b": {"nodes": len(graph_b.nodes), "edges": len(graph_b.edges)},
        },
        "inter_edge_count": len(session.joint.inter_edges),
        "current_lambda": session.current_lambda,
    }


def _layout_payload(session: Session, lam: float) -> dict:
    separated = separate_side_by_side(session.layouts[lam], DEFAULT_MARGIN)
    payload = separated.to_json()
    payload["lambda"] = lam
    payload["seed"] = session.seed
    return payload


def _alignments_payload(session: Session) -> dict:
    return {
        "seed": session.seed,
        "weights": session.weights.to_json(),
        "k": session.user_k,
        "tau": session.motif_tau,
        "eigenvalues": list(session.eigenvalues),
        "pairs": [p.to_json() for p in session.alignments],
        "bubbles": _bubbles_payload(session),
    }
