#!/usr/bin/env python3
"""Regenerate the API golden files and the frontend test fixtures.

Run from the repo root after an intentional wire-format change:

    python3 scripts/update_goldens.py
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
GOLDEN_DIR = ROOT / "tests" / "golden"
FRONTEND_FIXTURES = ROOT / "frontend" / "tests" / "fixtures"

sys.path.insert(0, str(ROOT / "src"))
sys.path.insert(0, str(ROOT / "tests"))

FRONTEND_SUBSET = (
    "get_session",
    "get_mappers",
    "get_layout",
    "put_lambda_0.5",
    "get_alignments",
    "get_merge_full",
    "get_merge_step0",
    "get_items_pair0",
    "get_items_inter",
    "get_projection",
    "post_summarize",
)


def main() -> int:
    from fastapi.testclient import TestClient

    from golden_script import run_canonical_walk
    from mapalign.demo import write_demo
    from mapalign.service import create_app

    with tempfile.TemporaryDirectory() as tmp:
        paths = write_demo(tmp, seed=0)
        client = TestClient(create_app())
        _, responses = run_canonical_walk(client, paths["manifest_a"], paths["manifest_b"])

    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    for name, response in responses.items():
        assert response.status_code == 200, f"{name}: {response.status_code}"
        path = GOLDEN_DIR / f"{name}.json"
        path.write_text(json.dumps(response.json(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        print(f"wrote {path.relative_to(ROOT)}")

    FRONTEND_FIXTURES.mkdir(parents=True, exist_ok=True)
    for name in FRONTEND_SUBSET:
        path = FRONTEND_FIXTURES / f"{name}.json"
        path.write_text(json.dumps(responses[name].json(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        print(f"wrote {path.relative_to(ROOT)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
