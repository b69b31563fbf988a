"""Synthetic demo pair: two views of one item universe with planted changes.

Set A places five categories as blobs along a norm gradient. Set B keeps the
same items but merges two categories into one region, splits another into
two, and leaves the rest roughly in place, so mapper comparison surfaces
one-to-one, fan-in, and fan-out structure out of the box.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .ingest import RepresentationSet, save_representation_set

CATEGORIES = ("location", "time", "manner", "purpose", "theme")

_WORDS = {
    "location": ("near", "inside", "around", "beyond", "under"),
    "time": ("during", "after", "before", "since", "until"),
    "manner": ("gently", "quickly", "loudly", "barely", "firmly"),
    "purpose": ("for", "toward", "seeking", "pursuing", "chasing"),
    "theme": ("about", "regarding", "concerning", "describing", "covering"),
}


def make_demo_sets(seed: int = 0, per_category: int = 64, dims: int = 6):
    """Two representation sets over a shared item universe."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 2024]))
    n = per_category * len(CATEGORIES)
    items = tuple(f"w{idx:04d}" for idx in range(n))
    labels = {}
    categories = []
    for idx, item in enumerate(items):
        cat = CATEGORIES[idx // per_category]
        labels[item] = cat
        categories.append(cat)

    def unit(vec):
        return vec / np.linalg.norm(vec)

    directions_a = {cat: unit(rng.normal(size=dims)) for cat in CATEGORIES}
    radii = {cat: 1.5 + i for i, cat in enumerate(CATEGORIES)}

    matrix_a = np.zeros((n, dims))
    for idx, cat in enumerate(categories):
        r = radii[cat] + rng.uniform(-0.45, 0.45)
        matrix_a[idx] = r * directions_a[cat] + rng.normal(scale=0.06, size=dims)

    # set B: "time" and "purpose" collapse onto one direction (fan-in),
    # "location" splits into two directions (fan-out), others persist
    directions_b = dict(directions_a)
    directions_b["purpose"] = directions_a["time"]
    split_direction = unit(directions_a["location"] + 0.9 * rng.normal(size=dims))
    matrix_b = np.zeros((n, dims))
    for idx, cat in enumerate(categories):
        direction = directions_b[cat]
        if cat == "location" and idx % 2 == 0:
            direction = split_direction
        r = radii[cat] + rng.uniform(-0.45, 0.45)
        matrix_b[idx] = r * direction + rng.normal(scale=0.06, size=dims)

    meta = {}
    attrs = {"intensity": {}}
    for idx, item in enumerate(items):
        cat = categories[idx]
        words = _WORDS[cat]
        w1 = words[idx % len(words)]
        w2 = words[(idx // len(words)) % len(words)]
        meta[item] = f"sample phrase {w1} the subject {w2} case {idx}"
        attrs["intensity"][item] = round(float(np.linalg.norm(matrix_a[idx])), 6)

    set_a = RepresentationSet("demo-a", items, matrix_a, labels=dict(labels), meta=dict(meta), numeric_attrs={"intensity": dict(attrs["intensity"])})
    set_b = RepresentationSet("demo-b", items, matrix_b, labels=dict(labels), meta=dict(meta), numeric_attrs={"intensity": dict(attrs["intensity"])})
    return set_a, set_b


def write_demo(directory: str | Path, seed: int = 0, per_category: int = 64) -> dict:
    """Write demo manifests plus a ready-to-run config; returns the paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    set_a, set_b = make_demo_sets(seed=seed, per_category=per_category)
    manifest_a = save_representation_set(set_a, directory)
    manifest_b = save_representation_set(set_b, directory)
    config = {
        "manifest_a": manifest_a.name,
        "manifest_b": manifest_b.name,
        "mapper": {
            "filter": "l2_norm",
            "num_intervals": 50,
            "overlap": 0.5,
            "dbscan_min_pts": 3,
            "dbscan_eps": "auto",
        },
        "layout": {
            "alignment_strengths": [0.0, 0.5, 1.0],
            "preferred_edge_length": 1.0,
            "repulsion": 0.01,
            "max_iters": 200,
            "step_size": 0.05,
            "step_decay": 0.99,
        },
        "affinity": {"alpha": 1.0, "beta": 1.0, "gamma": 1.0, "scale_inter_by_jaccard": False},
        "motif_tau": 0.05,
        "merge_strategy": "conditional",
        "out_dir": "out",
        "seed": seed,
    }
    config_path = directory / "demo-config.json"
    config_path.write_text(json.dumps(config, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return {"manifest_a": manifest_a, "manifest_b": manifest_b, "config": config_path}
