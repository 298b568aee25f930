from __future__ import annotations

import json
from pathlib import Path

import pytest

from textlens.ingest import Chunk

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS60 = FIXTURES / "corpus60"


@pytest.fixture
def corpus60_dir() -> Path:
    return CORPUS60


@pytest.fixture
def fixture_config(tmp_path: Path):
    """Write the standard fixture-corpus config into a tmp dir and return its path.

    The pipeline settings mirror how the corpus was designed: word_limit 40
    makes 60 chunks, min_cluster_size 10 yields the two vocabulary families.
    """

    def make(**overrides) -> Path:
        data = {
            "corpus_dir": str(CORPUS60.resolve()),
            "work_dir": str(tmp_path / "work"),
            "chunking": {"word_limit": 40},
            "reducer": {"method": "pca", "target_dim": 5, "random_seed": 0},
            "hdbscan": {"min_cluster_size": 10},
            "top_n": 10,
            "n_repr": 3,
            "coverage_m": 10,
            "default_k": 5,
        }
        data.update(overrides)
        path = tmp_path / "config.json"
        path.write_text(json.dumps(data, indent=2))
        return path

    return make


def make_chunk(doc_id: str, index: int, text: str) -> Chunk:
    return Chunk(
        doc_id=doc_id,
        chunk_index=index,
        chunk_id=f"{doc_id}_chunk{index}",
        text=text,
        word_count=len(text.split()),
    )
