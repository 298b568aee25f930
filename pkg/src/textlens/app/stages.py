"""Pipeline stage commands: each validates prerequisites, skips work whose
inputs have not changed, writes its artifacts atomically, and records itself
in the manifest.

With both providers local-deterministic and fixed seeds, two runs over the
same corpus produce byte-identical artifacts; every non-determinism source
(timestamps, float repr drift, dict ordering) is deliberately kept out of the
artifact files.
"""

from __future__ import annotations

import io
import json
import time
from pathlib import Path

import numpy as np

from .. import evalkit
from ..embed import EmbeddedChunk, embed_texts
from ..cluster import density, pca
from ..index import Query, RetrievalResult, VectorIndex
from ..ingest import chunk_corpus, load_corpus, read_chunks_jsonl
from ..label import label_topic_set, load_labels, save_labels
from ..topics import build_topics, load_topic_set, save_topic_set, topic_set_to_dict
from .config import PipelineConfig, config_fingerprint
from .manifest import (
    Manifest,
    WorkDirLock,
    atomic_write_bytes,
    atomic_write_text,
    corpus_digest,
    digest_of,
)

CHUNKS_FILE = "chunks.jsonl"
EMBEDDINGS_FILE = "embeddings.npy"
INDEX_FILE = "index.lens"
TOPICS_FILE = "topics.json"
LABELS_FILE = "labels.json"
REPORT_FILE = "report.json"
REPORT_TEXT_FILE = "report.txt"
HUMAN_SCORES_FILE = "human_scores.json"
BERT_SCORES_FILE = "bert_scores.json"


def _chunks_jsonl_bytes(chunks) -> bytes:
    buf = io.StringIO()
    for chunk in chunks:
        row = {
            "doc_id": chunk.doc_id,
            "chunk_id": chunk.chunk_id,
            "chunk_index": chunk.chunk_index,
            "text": chunk.text,
            "word_count": chunk.word_count,
        }
        buf.write(json.dumps(row, ensure_ascii=False) + "\n")
    return buf.getvalue().encode("utf-8")


def stage_ingest(cfg: PipelineConfig) -> dict:
    start = time.perf_counter()
    cfg.work_dir.mkdir(parents=True, exist_ok=True)
    with WorkDirLock(cfg.work_dir):
        manifest = Manifest.load(cfg.work_dir)
        input_digest = digest_of(
            [corpus_digest(cfg.corpus_dir), config_fingerprint(cfg, "chunking")]
        )
        if manifest.is_complete("ingest", input_digest):
            entry = manifest.stage_entry("ingest")
            return {**entry["summary"], "skipped": True}
        loaded = load_corpus(cfg.corpus_dir)
        chunks = chunk_corpus(loaded.documents, cfg.chunking)
        atomic_write_bytes(cfg.work_dir / CHUNKS_FILE, _chunks_jsonl_bytes(chunks))
        summary = {
            "stage": "ingest",
            "docs": len(loaded.documents),
            "skipped_files": loaded.skipped,
            "chunks": len(chunks),
            "seconds": round(time.perf_counter() - start, 3),
        }
        manifest.record_stage("ingest", input_digest, summary)
        return summary


def _npy_bytes(matrix: np.ndarray) -> bytes:
    buf = io.BytesIO()
    np.save(buf, matrix)
    return buf.getvalue()


def stage_embed(cfg: PipelineConfig) -> dict:
    start = time.perf_counter()
    with WorkDirLock(cfg.work_dir):
        manifest = Manifest.load(cfg.work_dir)
        chunks_digest = manifest.artifact_digest("ingest", CHUNKS_FILE)
        input_digest = digest_of(
            [chunks_digest, config_fingerprint(cfg, "embed_stage", "retrieval_stage")]
        )
        if manifest.is_complete("embed", input_digest):
            entry = manifest.stage_entry("embed")
            return {**entry["summary"], "skipped": True}
        chunks = read_chunks_jsonl(cfg.work_dir / CHUNKS_FILE)
        texts = [c.text for c in chunks]

        topic_vectors = embed_texts(cfg.embed_stage, texts)
        atomic_write_bytes(
            cfg.work_dir / EMBEDDINGS_FILE,
            _npy_bytes(topic_vectors.astype(np.float32)),
        )

        retrieval_vectors = embed_texts(cfg.retrieval_stage, texts)
        index = VectorIndex(cfg.retrieval_stage.dim)
        index.upsert(
            EmbeddedChunk(chunk=c, vector=retrieval_vectors[i])
            for i, c in enumerate(chunks)
        )
        index.save(cfg.work_dir / INDEX_FILE)

        summary = {
            "stage": "embed",
            "chunks": len(chunks),
            "topic_dim": cfg.embed_stage.dim,
            "retrieval_dim": cfg.retrieval_stage.dim,
            "index_size": len(index),
            "seconds": round(time.perf_counter() - start, 3),
        }
        manifest.record_stage("embed", input_digest, summary)
        return summary


def stage_topics(cfg: PipelineConfig) -> dict:
    start = time.perf_counter()
    with WorkDirLock(cfg.work_dir):
        manifest = Manifest.load(cfg.work_dir)
        chunks_digest = manifest.artifact_digest("ingest", CHUNKS_FILE)
        embeddings_digest = manifest.artifact_digest("embed", EMBEDDINGS_FILE)
        input_digest = digest_of(
            [
                chunks_digest,
                embeddings_digest,
                config_fingerprint(cfg, "reducer", "hdbscan", "top_n", "n_repr"),
            ]
        )
        if manifest.is_complete("topics", input_digest):
            entry = manifest.stage_entry("topics")
            return {**entry["summary"], "skipped": True}
        chunks = read_chunks_jsonl(cfg.work_dir / CHUNKS_FILE)
        vectors = np.load(cfg.work_dir / EMBEDDINGS_FILE).astype(np.float64)

        reduced = pca.reduce(vectors, cfg.reducer)
        assignment = density.hdbscan(reduced, cfg.hdbscan)
        topic_set = build_topics(
            chunks, assignment, vectors, top_n=cfg.top_n, n_repr=cfg.n_repr
        )
        atomic_write_text(
            cfg.work_dir / TOPICS_FILE,
            json.dumps(topic_set_to_dict(topic_set), indent=2, ensure_ascii=False)
            + "\n",
        )
        summary = {
            "stage": "topics",
            "chunks": len(chunks),
            "clusters": assignment.num_clusters,
            "noise": topic_set.noise_count,
            "seconds": round(time.perf_counter() - start, 3),
        }
        manifest.record_stage("topics", input_digest, summary)
        return summary


def stage_label(cfg: PipelineConfig) -> dict:
    start = time.perf_counter()
    with WorkDirLock(cfg.work_dir):
        manifest = Manifest.load(cfg.work_dir)
        topics_digest = manifest.artifact_digest("topics", TOPICS_FILE)
        manifest.require("ingest")
        input_digest = digest_of(
            [topics_digest, config_fingerprint(cfg, "labeler", "prompt")]
        )
        if manifest.is_complete("label", input_digest):
            entry = manifest.stage_entry("label")
            return {**entry["summary"], "skipped": True}
        topic_set = load_topic_set(cfg.work_dir / TOPICS_FILE)
        chunks = read_chunks_jsonl(cfg.work_dir / CHUNKS_FILE)
        chunks_by_id = {c.chunk_id: c.text for c in chunks}
        labels = label_topic_set(topic_set, cfg.labeler, cfg.prompt, chunks_by_id)
        save_labels(labels, cfg.work_dir / LABELS_FILE)
        summary = {
            "stage": "label",
            "topics": len(labels),
            "flagged": sum(1 for lb in labels if lb.flagged),
            "seconds": round(time.perf_counter() - start, 3),
        }
        manifest.record_stage("label", input_digest, summary)
        return summary


def stage_eval(cfg: PipelineConfig) -> dict:
    start = time.perf_counter()
    with WorkDirLock(cfg.work_dir):
        manifest = Manifest.load(cfg.work_dir)
        topics_digest = manifest.artifact_digest("topics", TOPICS_FILE)
        labels_digest = manifest.artifact_digest("label", LABELS_FILE)
        manifest.require("ingest")
        sidecars = {}
        for name in (HUMAN_SCORES_FILE, BERT_SCORES_FILE):
            path = cfg.work_dir / name
            if path.exists():
                sidecars[name] = json.loads(path.read_text(encoding="utf-8"))
        input_digest = digest_of(
            [
                topics_digest,
                labels_digest,
                config_fingerprint(cfg, "retrieval_stage", "coverage_m"),
                sidecars,
            ]
        )
        if manifest.is_complete("eval", input_digest):
            entry = manifest.stage_entry("eval")
            return {**entry["summary"], "skipped": True}
        topic_set = load_topic_set(cfg.work_dir / TOPICS_FILE)
        labels = load_labels(cfg.work_dir / LABELS_FILE)
        labels_by_id = {tid: row["label"] for tid, row in labels.items()}
        chunks = read_chunks_jsonl(cfg.work_dir / CHUNKS_FILE)
        texts_by_id = {c.chunk_id: c.text for c in chunks}

        report = evalkit.build_report(
            topic_set,
            labels_by_id,
            texts_by_id,
            cfg.retrieval_stage,
            coverage_m=cfg.coverage_m,
        )
        if HUMAN_SCORES_FILE in sidecars:
            evalkit.attach_human_scores(
                report,
                {int(k): v for k, v in sidecars[HUMAN_SCORES_FILE].items()},
            )
        if BERT_SCORES_FILE in sidecars:
            evalkit.attach_bert_scores(
                report,
                {int(k): v for k, v in sidecars[BERT_SCORES_FILE].items()},
            )
        atomic_write_text(
            cfg.work_dir / REPORT_FILE,
            json.dumps(evalkit.report_to_dict(report), indent=2, ensure_ascii=False)
            + "\n",
        )
        atomic_write_text(
            cfg.work_dir / REPORT_TEXT_FILE,
            evalkit.render_text_table(report, labels_by_id),
        )
        summary = {
            "stage": "eval",
            "topics": len(report.per_topic),
            "hallucinations": report.hallucination_count,
            "metric_failures": report.metric_failures,
            "seconds": round(time.perf_counter() - start, 3),
        }
        manifest.record_stage("eval", input_digest, summary)
        return summary


def run_query(cfg: PipelineConfig, text: str, k: int) -> RetrievalResult:
    """Embed a query with the retrieval provider and search the index."""
    if not text.strip():
        raise ValueError("query text must be non-empty")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    manifest = Manifest.load(cfg.work_dir)
    manifest.require("embed")
    index = VectorIndex.load(cfg.work_dir / INDEX_FILE)
    vector = embed_texts(cfg.retrieval_stage, [text])[0]
    return index.search(Query(text=text, vector=vector, k=k))


def run_pipeline(cfg: PipelineConfig) -> list[dict]:
    """All five stages in order; returns their summaries."""
    return [
        stage_ingest(cfg),
        stage_embed(cfg),
        stage_topics(cfg),
        stage_label(cfg),
        stage_eval(cfg),
    ]
