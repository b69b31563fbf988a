"""Batch driver and service launcher.

`mapalign run` executes the whole pipeline from a config file and writes a
report bundle; `mapalign serve` starts the HTTP API (optionally with a
pre-created session and static UI assets).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .align import AffinityWeights, discover_alignments
from .bubbles import bubble_set, bubbles_json
from .errors import InvalidParameterError, MapAlignError
from .ingest import intersect_items, load_representation_set
from .joint import build_joint
from .layout import LayoutParams, optimize_layout, separate_side_by_side
from .mapper import MapperParams, build_mapper
from .merge import STRATEGIES, greedy_merge
from .motif import DEFAULT_TAU, MOTIF_KINDS, classify_pair
from .service import DEFAULT_MARGIN, DEFAULT_NODE_RADIUS, create_app
from .snapshot import render_overview_svg

_TOP_LEVEL_KEYS = {
    "manifest_a",
    "manifest_b",
    "mapper",
    "mapper_b",
    "layout",
    "affinity",
    "k",
    "motif_tau",
    "merge_strategy",
    "bubble_node_radius",
    "separation_margin",
    "out_dir",
    "seed",
}


def load_config(path: str | Path) -> dict:
    """Parse and schema-check a JSON or TOML run config."""
    path = Path(path)
    if not path.exists():
        raise InvalidParameterError(f"config not found: {path}")
    try:
        if path.suffix.lower() == ".toml":
            try:
                import tomllib  # py311+
            except ModuleNotFoundError:
                import tomli as tomllib
            config = tomllib.loads(path.read_text(encoding="utf-8"))
        else:
            config = json.loads(path.read_text(encoding="utf-8"))
    except ValueError as exc:
        raise InvalidParameterError(f"config is not valid {path.suffix.lstrip('.').upper() or 'JSON'}: {exc}") from exc
    if not isinstance(config, dict):
        raise InvalidParameterError("config root must be an object")
    unknown = set(config) - _TOP_LEVEL_KEYS
    if unknown:
        raise InvalidParameterError(f"unknown config key(s): {sorted(unknown)}")
    for key in ("manifest_a", "manifest_b"):
        if key not in config:
            raise InvalidParameterError(f"config missing required key {key!r}")
        config[key] = str((path.parent / config[key]).resolve()) if not Path(config[key]).is_absolute() else config[key]
    strategy = config.get("merge_strategy", "conditional")
    if strategy not in STRATEGIES:
        raise InvalidParameterError(f"merge_strategy must be one of {STRATEGIES}, got {strategy!r}")
    strengths = (config.get("layout") or {}).get("alignment_strengths", [0.0, 0.5, 1.0])
    if not isinstance(strengths, list) or not strengths:
        raise InvalidParameterError("layout.alignment_strengths must be a non-empty list")
    _require_numbers(config, strengths)
    return config


def _require_numbers(config: dict, strengths: list) -> None:
    checks = [
        ("layout.alignment_strengths", strengths, False),
        ("k", [config["k"]] if config.get("k") is not None else [], False),
        ("motif_tau", [config.get("motif_tau", 0.0)], False),
        ("bubble_node_radius", [config.get("bubble_node_radius", 1.0)], False),
        ("separation_margin", [config.get("separation_margin", 1.0)], False),
        ("seed", [config.get("seed", 0)], True),
    ]
    for name, values, want_int in checks:
        for value in values:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise InvalidParameterError(f"{name} must be numeric, got {value!r}")
            if want_int and not isinstance(value, int):
                raise InvalidParameterError(f"{name} must be an integer, got {value!r}")
            if value < 0:
                raise InvalidParameterError(f"{name} must be >= 0, got {value!r}")


def _dump(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _strength_tag(value: float) -> str:
    return f"{value:g}"


def run(config: dict, out_dir: str | Path, seed: int | None = None) -> Path:
    """Execute the full pipeline and write the report bundle."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seed = int(config.get("seed", 0)) if seed is None else int(seed)

    set_a = load_representation_set(config["manifest_a"])
    set_b = load_representation_set(config["manifest_b"])
    session = intersect_items(set_a, set_b)
    set_a = set_a.subset(session.shared_items)
    set_b = set_b.subset(session.shared_items)

    mapper_cfg = dict(config.get("mapper") or {})
    params_a = MapperParams(**mapper_cfg)
    params_b = MapperParams(**{**mapper_cfg, **(config.get("mapper_b") or {})})
    graph_a = build_mapper(set_a, params_a)
    graph_b = build_mapper(set_b, params_b)
    joint = build_joint(graph_a, graph_b)
    _dump(out / "mappers.json", {"a": graph_a.to_json(), "b": graph_b.to_json()})
    _dump(out / "joint.json", joint.inter_json())

    layout_cfg = dict(config.get("layout") or {})
    strengths = [float(s) for s in layout_cfg.pop("alignment_strengths", [0.0, 0.5, 1.0])]
    base_params = LayoutParams(**{**layout_cfg, "seed": seed})
    last_layout = None
    for strength in strengths:
        params = replace(base_params, alignment_strength=strength)
        result = separate_side_by_side(optimize_layout(joint, params), float(config.get("separation_margin", DEFAULT_MARGIN)))
        payload = result.to_json()
        payload["lambda"] = strength
        payload["seed"] = seed
        _dump(out / f"layout_{_strength_tag(strength)}.json", payload)
        last_layout = result

    weights = AffinityWeights(**(config.get("affinity") or {}))
    tau = float(config.get("motif_tau", DEFAULT_TAU))
    discovery = discover_alignments(joint, weights, k=config.get("k"), seed=seed)
    pairs = [replace(p, motif=classify_pair(p, joint, tau)) for p in discovery.pairs]
    _dump(
        out / "alignments.json",
        {
            "seed": seed,
            "weights": weights.to_json(),
            "k": config.get("k"),
            "tau": tau,
            "eigenvalues": list(discovery.eigenvalues),
            "pairs": [p.to_json() for p in pairs],
        },
    )

    node_radius = float(config.get("bubble_node_radius", DEFAULT_NODE_RADIUS))
    per_pair = {p.id: bubble_set(p, last_layout, node_radius=node_radius) for p in pairs}
    bubbles = bubbles_json(per_pair)
    _dump(out / "bubbles.json", bubbles)

    strategy = config.get("merge_strategy", "conditional")
    merges_dir = out / "merges"
    merges_dir.mkdir(exist_ok=True)
    for pair in pairs:
        sequence = greedy_merge(pair, joint, strategy=strategy)
        payload = sequence.to_json()
        payload["pair_id"] = pair.id
        _dump(merges_dir / f"pair_{pair.id}.json", payload)

    motif_counts = {kind: 0 for kind in MOTIF_KINDS}
    for pair in pairs:
        motif_counts[pair.motif.kind] += 1
    _dump(
        out / "summary.json",
        {
            "seed": seed,
            "n_shared_items": len(session.shared_items),
            "graph_sizes": {
                "a": {"nodes": len(graph_a.nodes), "edges": len(graph_a.edges)},
                "b": {"nodes": len(graph_b.nodes), "edges": len(graph_b.edges)},
            },
            "inter_edge_count": len(joint.inter_edges),
            "alignment_strengths": strengths,
            "n_pairs": len(pairs),
            "motif_counts": motif_counts,
            "merge_strategy": strategy,
        },
    )

    svg = render_overview_svg(joint, last_layout, bubbles, node_radius=node_radius)
    (out / "overview.svg").write_text(svg, encoding="utf-8")
    return out


def serve(config: dict | None, host: str, port: int, persist_dir: str | None = None) -> None:
    """Run the HTTP API; binds an ephemeral port when `port` is 0."""
    import uvicorn

    session_body = None
    if config:
        session_body = {
            "manifest_a": config["manifest_a"],
            "manifest_b": config["manifest_b"],
            "mapper_params": config.get("mapper"),
            "mapper_params_b": config.get("mapper_b"),
            "layout_params": {k: v for k, v in (config.get("layout") or {}).items() if k != "alignment_strengths"},
            "seed": config.get("seed", 0),
        }
        session_body = {k: v for k, v in session_body.items() if v is not None}
    app = create_app(persist_dir=persist_dir, default_config=session_body)

    ui_dist = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if not ui_dist.is_dir():
        ui_dist = Path.cwd() / "frontend" / "dist"
    if ui_dist.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dist), html=True), name="ui")

    import socket as socket_mod

    sock = socket_mod.socket(socket_mod.AF_INET, socket_mod.SOCK_STREAM)
    sock.setsockopt(socket_mod.SOL_SOCKET, socket_mod.SO_REUSEADDR, 1)
    sock.bind((host, port))
    sock.listen(128)
    bound_host, bound_port = sock.getsockname()[:2]
    print(f"listening on http://{bound_host}:{bound_port}", flush=True)
    if getattr(app.state, "default_session_id", None):
        print(f"default session: {app.state.default_session_id}", flush=True)

    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    server.run(sockets=[sock])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mapalign", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run the batch pipeline and write a report bundle")
    run_p.add_argument("--config", required=True, help="JSON or TOML run config")
    run_p.add_argument("--out", default=None, help="output directory (default: config out_dir)")
    run_p.add_argument("--seed", type=int, default=None, help="override the config seed")

    serve_p = sub.add_parser("serve", help="serve the HTTP API and UI assets")
    serve_p.add_argument("--config", default=None, help="optional config; pre-creates a demo session")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8040)
    serve_p.add_argument("--persist-dir", default=None, help="directory for session persistence bundles")

    demo_p = sub.add_parser("demo", help="write the synthetic demo dataset and config")
    demo_p.add_argument("--out", required=True, help="directory for the demo files")
    demo_p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            config = load_config(args.config)
            out_dir = args.out or config.get("out_dir") or "out"
            if not Path(out_dir).is_absolute():
                out_dir = Path(args.config).resolve().parent / out_dir if args.out is None else Path(out_dir)
            bundle = run(config, out_dir, seed=args.seed)
            print(f"report bundle written to {bundle}")
            return 0
        if args.command == "serve":
            config = load_config(args.config) if args.config else None
            serve(config, host=args.host, port=args.port, persist_dir=args.persist_dir)
            return 0
        if args.command == "demo":
            from .demo import write_demo

            paths = write_demo(args.out, seed=args.seed)
            print(f"demo config written to {paths['config']}")
            return 0
    except MapAlignError as exc:
        print(json.dumps(exc.to_payload()), file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
