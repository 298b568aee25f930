"""Exact retrieval against a full-sort oracle, and the on-disk format."""

from __future__ import annotations

import struct
import zlib

import numpy as np
import pytest

from textlens.embed import EmbeddedChunk, unit_rows
from textlens.errors import (
    ContractViolationError,
    EmptyIndexError,
    IndexFormatError,
    IndexVersionError,
)
from textlens.index import FORMAT_VERSION, MAGIC, Hit, Query, VectorIndex

from conftest import make_chunk


def oracle_search(index: VectorIndex, query: Query) -> list[tuple[str, float]]:
    """Independent full sort over every entry: (score desc, chunk_id asc).

    Scores use the same arithmetic definition as the implementation (float64
    matvec over the float32 rows); what this oracle keeps independent is the
    ranking itself.
    """
    ids = index.chunk_ids()
    matrix = np.vstack([index.vector_for(c) for c in ids]).astype(np.float64)
    scores = matrix @ np.asarray(query.vector, dtype=np.float64)
    scored = sorted(zip(ids, scores.tolist()), key=lambda pair: (-pair[1], pair[0]))
    return scored[: min(query.k, len(scored))]


def build_index(n: int, dim: int, seed: int = 0) -> tuple[VectorIndex, np.ndarray]:
    rng = np.random.default_rng(seed)
    vectors = unit_rows(rng.normal(size=(n, dim)))
    index = VectorIndex(dim)
    index.upsert(
        EmbeddedChunk(chunk=make_chunk(f"doc{i:04d}", 1, f"text {i}"), vector=vectors[i])
        for i in range(n)
    )
    return index, vectors


def unit_query(dim: int, seed: int, k: int = 5) -> Query:
    rng = np.random.default_rng(seed)
    vec = rng.normal(size=dim)
    vec /= np.linalg.norm(vec)
    return Query(text="q", vector=vec, k=k)


class TestUpsert:
    def test_insert_then_replace(self):
        index = VectorIndex(4)
        v1 = np.array([1.0, 0.0, 0.0, 0.0])
        v2 = np.array([0.0, 1.0, 0.0, 0.0])
        chunks = [make_chunk("d", i + 1, f"t{i}") for i in range(3)]
        index.upsert(EmbeddedChunk(chunk=c, vector=v1) for c in chunks)
        assert len(index) == 3
        index.upsert([EmbeddedChunk(chunk=chunks[1], vector=v2)])
        assert len(index) == 3
        assert np.allclose(index.vector_for("d_chunk2"), v2.astype(np.float32))

    def test_empty_index_size(self):
        index = VectorIndex(8)
        count = index.upsert(
            [EmbeddedChunk(chunk=make_chunk("d", 1, "t"), vector=np.eye(8)[0])]
        )
        assert count == 1 and len(index) == 1

    def test_dim_mismatch_rejected(self):
        index = VectorIndex(8)
        with pytest.raises(ContractViolationError):
            index.upsert(
                [EmbeddedChunk(chunk=make_chunk("d", 1, "t"), vector=np.ones(4))]
            )

    def test_unnormalized_vector_rejected(self):
        index = VectorIndex(4)
        with pytest.raises(ContractViolationError):
            index.upsert(
                [EmbeddedChunk(chunk=make_chunk("d", 1, "t"), vector=np.ones(4))]
            )

    def test_capacity_smoke(self):
        # Full-corpus scale: insert fast, search still exact at the top rank.
        index, vectors = build_index(5000, 32, seed=3)
        assert len(index) == 5000
        query = Query(text="q", vector=vectors[123].astype(np.float64), k=1)
        assert index.search(query).hits[0].chunk_id == "doc0123_chunk1"


class TestSearch:
    def test_self_similarity_ranks_first(self):
        index, vectors = build_index(50, 16, seed=1)
        query = Query(text="q", vector=vectors[7], k=3)
        hits = index.search(query).hits
        assert hits[0].chunk_id == "doc0007_chunk1"
        assert abs(hits[0].score - 1.0) < 1e-6

    def test_k_larger_than_index(self):
        index, _ = build_index(5, 8, seed=2)
        hits = index.search(unit_query(8, 9, k=50)).hits
        assert len(hits) == 5
        scores = [h.score for h in hits]
        assert scores == sorted(scores, reverse=True)

    def test_matches_oracle_on_random_entries(self):
        index, _ = build_index(1000, 24, seed=4)
        for seed in range(10):
            for k in (1, 5, 100):
                query = unit_query(24, 100 + seed, k=k)
                hits = index.search(query).hits
                expected = oracle_search(index, query)
                assert [(h.chunk_id, h.score) for h in hits] == expected

    def test_tie_break_by_chunk_id(self):
        index = VectorIndex(4)
        same = np.array([1.0, 0.0, 0.0, 0.0])
        for name in ["zeta", "alpha", "mid"]:
            index.upsert(
                [EmbeddedChunk(chunk=make_chunk(name, 1, name), vector=same)]
            )
        hits = index.search(Query(text="q", vector=same, k=2)).hits
        assert [h.chunk_id for h in hits] == ["alpha_chunk1", "mid_chunk1"]

    def test_monotone_k_prefix(self):
        index, _ = build_index(200, 16, seed=5)
        query_small = unit_query(16, 77, k=7)
        query_large = unit_query(16, 77, k=8)
        small = index.search(query_small).hits
        large = index.search(query_large).hits
        assert [h.chunk_id for h in large][:7] == [h.chunk_id for h in small]

    def test_scores_bounded(self):
        index, _ = build_index(300, 12, seed=6)
        hits = index.search(unit_query(12, 55, k=300)).hits
        for hit in hits:
            assert -1.0 - 1e-6 <= hit.score <= 1.0 + 1e-6

    def test_empty_index_error(self):
        index = VectorIndex(8)
        with pytest.raises(EmptyIndexError):
            index.search(unit_query(8, 1))

    def test_query_validation(self):
        with pytest.raises(ValueError):
            Query(text="q", vector=np.eye(4)[0], k=0)
        with pytest.raises(ValueError):
            Query(text="q", vector=np.ones(4), k=1)


class TestPersistence:
    def test_round_trip_preserves_everything(self, tmp_path):
        index, _ = build_index(100, 16, seed=7)
        path = tmp_path / "index.lens"
        index.save(path)
        loaded = VectorIndex.load(path)
        assert len(loaded) == 100
        assert loaded.chunk_ids() == index.chunk_ids()
        for chunk_id in index.chunk_ids():
            assert index.vector_for(chunk_id).tobytes() == loaded.vector_for(chunk_id).tobytes()
        query = unit_query(16, 42, k=10)
        assert index.search(query).hits == loaded.search(query).hits

    def test_save_is_byte_deterministic(self, tmp_path):
        index, _ = build_index(20, 8, seed=8)
        index.save(tmp_path / "a.lens")
        index.save(tmp_path / "b.lens")
        assert (tmp_path / "a.lens").read_bytes() == (tmp_path / "b.lens").read_bytes()

    def test_empty_round_trip(self, tmp_path):
        index = VectorIndex(8)
        index.save(tmp_path / "empty.lens")
        assert len(VectorIndex.load(tmp_path / "empty.lens")) == 0

    def test_truncated_vectors_is_format_error(self, tmp_path):
        index, _ = build_index(50, 8, seed=9)
        path = tmp_path / "index.lens"
        index.save(path)
        blob = path.read_bytes()
        path.write_bytes(blob[: len(blob) - 8 * 4 - 4])  # drop two vectors + crc
        with pytest.raises(IndexFormatError, match="vector"):
            VectorIndex.load(path)

    def test_truncated_metadata_is_format_error(self, tmp_path):
        index, _ = build_index(10, 8, seed=10)
        path = tmp_path / "index.lens"
        index.save(path)
        path.write_bytes(path.read_bytes()[:40])
        with pytest.raises(IndexFormatError, match="metadata"):
            VectorIndex.load(path)

    def test_corrupted_byte_fails_crc(self, tmp_path):
        index, _ = build_index(10, 8, seed=11)
        path = tmp_path / "index.lens"
        index.save(path)
        blob = bytearray(path.read_bytes())
        blob[60] ^= 0xFF
        path.write_bytes(bytes(blob))
        with pytest.raises(IndexFormatError):
            VectorIndex.load(path)

    def test_wrong_magic_is_version_error(self, tmp_path):
        index, _ = build_index(3, 8, seed=12)
        path = tmp_path / "index.lens"
        index.save(path)
        blob = bytearray(path.read_bytes())
        blob[:8] = b"NOTMAGIC"
        path.write_bytes(bytes(blob))
        with pytest.raises(IndexVersionError):
            VectorIndex.load(path)

    def test_wrong_version_is_version_error(self, tmp_path):
        index, _ = build_index(3, 8, seed=13)
        path = tmp_path / "index.lens"
        index.save(path)
        blob = bytearray(path.read_bytes())
        struct.pack_into("<I", blob, 8, FORMAT_VERSION + 9)
        # keep the CRC honest so the version check is what fires
        struct.pack_into("<I", blob, len(blob) - 4, zlib.crc32(bytes(blob[:-4])))
        path.write_bytes(bytes(blob))
        with pytest.raises(IndexVersionError):
            VectorIndex.load(path)

    def test_header_layout(self, tmp_path):
        index, _ = build_index(2, 8, seed=14)
        path = tmp_path / "index.lens"
        index.save(path)
        blob = path.read_bytes()
        magic, version, dim, count = struct.unpack_from("<8sIIQ", blob, 0)
        assert magic == MAGIC
        assert version == FORMAT_VERSION
        assert (dim, count) == (8, 2)
        stored_crc = struct.unpack_from("<I", blob, len(blob) - 4)[0]
        assert stored_crc == zlib.crc32(blob[:-4])
