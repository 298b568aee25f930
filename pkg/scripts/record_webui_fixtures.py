#!/usr/bin/env python3
"""Record fixture-service API responses for the web UI's test suite.

Builds the 60-chunk fixture project in a temp dir, drives the real service
app in process, and freezes the responses the UI tests replay:
GET /api/health, GET /api/topics, and POST /api/query at k=3 and k=5.
"""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from textlens.app.config import load_config
from textlens.app.service import create_app, load_project
from textlens.app.stages import run_pipeline

ROOT = Path(__file__).resolve().parent.parent
OUT_DIR = ROOT / "web" / "test" / "fixtures"
CORPUS = ROOT / "tests" / "fixtures" / "corpus60"


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        config_path = Path(tmp) / "config.json"
        config_path.write_text(
            json.dumps(
                {
                    "corpus_dir": str(CORPUS),
                    "work_dir": str(Path(tmp) / "work"),
                    "chunking": {"word_limit": 40},
                    "reducer": {"method": "pca", "target_dim": 5, "random_seed": 0},
                    "hdbscan": {"min_cluster_size": 10},
                }
            )
        )
        cfg = load_config(config_path)
        run_pipeline(cfg)
        client = TestClient(create_app(load_project(cfg)))

        recordings = {
            "health.json": client.get("/api/health").json(),
            "topics.json": client.get("/api/topics").json(),
            "query_tractor_k3.json": client.post(
                "/api/query", json={"query": "tractor engines", "k": 3}
            ).json(),
            "query_wheat_k5.json": client.post(
                "/api/query", json={"query": "wheat harvest prices", "k": 5}
            ).json(),
        }
        for name, body in recordings.items():
            (OUT_DIR / name).write_text(json.dumps(body, indent=2) + "\n")
            print(f"wrote {OUT_DIR / name}")


if __name__ == "__main__":
    main()
