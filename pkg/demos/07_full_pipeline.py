"""The five-stage pipeline, end to end
======================================

What `lens ingest|embed|topics|label|eval` does, driven as a library: each
stage writes its artifact atomically, records input digests in the manifest,
and re-running a stage with unchanged inputs is a no-op.  Two runs over the
same corpus produce byte-identical artifacts.
"""

import json
import tempfile
from pathlib import Path

from textlens.app.config import load_config
from textlens.app.stages import run_pipeline, run_query

CORPUS = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "corpus60"

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
            },
            indent=2,
        )
    )
    cfg = load_config(config_path)

    print("first run:")
    for summary in run_pipeline(cfg):
        print("  " + " ".join(f"{k}={v}" for k, v in summary.items()))

    print("\nsecond run (digests match, every stage skips):")
    for summary in run_pipeline(cfg):
        skipped = " (skipped)" if summary.get("skipped") else ""
        print(f"  stage={summary['stage']}{skipped}")

    print("\nquery the built index:")
    result = run_query(cfg, "wheat harvest prices", 3)
    for rank, hit in enumerate(result.hits, start=1):
        print(f"  {rank}. {hit.score:.4f}  {hit.chunk_id}")

    labels = json.loads((cfg.work_dir / "labels.json").read_text())
    print("\ntopic labels:", [row["label"] for row in labels])
