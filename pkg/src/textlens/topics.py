"""Class-based TF-IDF keyword extraction and Topic assembly.

A cluster's term importance is the in-class term-frequency ratio times
log(N / n_t), where N is the number of classes and n_t counts the classes
containing the term (natural log, no smoothing: in-vocabulary terms have
n_t >= 1 by construction).  Topics bundle the top-scored keywords with
centroid-nearest representative chunks and membership statistics.
"""

from __future__ import annotations

import json
import string
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import sparse

from ._stopwords import STOPWORDS
from .cluster.density import ClusterAssignment
from .errors import EmptyModelError
from .ingest import Chunk

_STRIP_CHARS = string.punctuation + string.whitespace


def tokenize(text: str) -> list[str]:
    """Whitespace tokens, edge punctuation stripped, short and stop words out.

    Input is expected lowercased (cleaned chunk text already is; callers with
    mixed-case labels lowercase first).
    """
    tokens = []
    for raw in text.split():
        token = raw.strip(_STRIP_CHARS)
        if len(token) >= 2 and token not in STOPWORDS:
            tokens.append(token)
    return tokens


def token_set(text: str) -> set[str]:
    """Every whitespace token of a text, lowercased and edge-stripped.

    Unlike tokenize(), nothing is filtered out: this is the "does word w occur
    in this document" side of containment checks.
    """
    return {t.strip(_STRIP_CHARS) for t in text.lower().split()}


@dataclass
class CtfidfModel:
    vocabulary: list[str]              # sorted ascending
    term_index: dict[str, int]
    counts: sparse.csc_matrix          # (V, N) term frequencies per class
    num_classes: int
    class_presence: np.ndarray         # (V,) number of classes containing term
    class_totals: np.ndarray           # (N,) total term occurrences per class


def fit_ctfidf(chunks: Sequence[Chunk], assignment: ClusterAssignment) -> CtfidfModel:
    """Count terms over the concatenation of each class's chunks.

    Noise chunks (label -1) are excluded entirely.
    """
    if len(chunks) != len(assignment.labels):
        raise ValueError(
            f"chunks ({len(chunks)}) and labels ({len(assignment.labels)}) differ"
        )
    num_classes = assignment.num_clusters
    if num_classes < 1:
        raise EmptyModelError("every chunk is noise; nothing to fit")

    class_counters: list[Counter] = [Counter() for _ in range(num_classes)]
    for chunk, label in zip(chunks, assignment.labels):
        if label < 0:
            continue
        class_counters[int(label)].update(tokenize(chunk.text))

    vocabulary = sorted(set().union(*class_counters))
    if not vocabulary:
        raise EmptyModelError("no usable terms after tokenization")
    term_index = {term: i for i, term in enumerate(vocabulary)}

    rows, cols, data = [], [], []
    for class_id, counter in enumerate(class_counters):
        for term, count in counter.items():
            rows.append(term_index[term])
            cols.append(class_id)
            data.append(float(count))
    counts = sparse.csc_matrix(
        (data, (rows, cols)), shape=(len(vocabulary), num_classes)
    )
    presence = np.asarray((counts > 0).sum(axis=1)).ravel().astype(np.int64)
    totals = np.asarray(counts.sum(axis=0)).ravel()
    return CtfidfModel(
        vocabulary=vocabulary,
        term_index=term_index,
        counts=counts,
        num_classes=num_classes,
        class_presence=presence,
        class_totals=totals,
    )


def score_ctfidf(model: CtfidfModel, term: str, class_id: int) -> float:
    """(f_tc / total_c) * ln(N / n_t); unknown terms score 0."""
    if not 0 <= class_id < model.num_classes:
        raise ValueError(
            f"class_id {class_id} out of range [0, {model.num_classes})"
        )
    idx = model.term_index.get(term)
    if idx is None:
        return 0.0
    total = model.class_totals[class_id]
    if total == 0.0:
        return 0.0
    tf = model.counts[idx, class_id] / total
    idf = np.log(model.num_classes / model.class_presence[idx])
    return float(tf * idf)


def class_scores(model: CtfidfModel, class_id: int) -> np.ndarray:
    """Vectorized score of every vocabulary term for one class."""
    if not 0 <= class_id < model.num_classes:
        raise ValueError(
            f"class_id {class_id} out of range [0, {model.num_classes})"
        )
    col = np.asarray(model.counts[:, class_id].todense()).ravel()
    total = model.class_totals[class_id]
    if total == 0.0:
        return np.zeros(len(model.vocabulary))
    idf = np.log(model.num_classes / model.class_presence)
    return (col / total) * idf


@dataclass
class Topic:
    topic_id: int
    keywords: list[tuple[str, float]]     # (term, score), score non-increasing
    representative_chunk_ids: list[str]
    frequency: int
    member_chunk_ids: list[str]           # centroid-ranked, best first

    def keyword_terms(self) -> list[str]:
        return [term for term, _ in self.keywords]


@dataclass
class TopicSet:
    topics: list[Topic]                   # descending frequency, ties by id
    noise_count: int

    def total_chunks(self) -> int:
        return sum(t.frequency for t in self.topics) + self.noise_count


def build_topics(
    chunks: Sequence[Chunk],
    assignment: ClusterAssignment,
    vectors: np.ndarray,
    top_n: int = 10,
    n_repr: int = 3,
) -> TopicSet:
    """Assemble one Topic per cluster.

    Keywords are the top_n in-class terms by c-TF-IDF (ties by term order);
    member chunk ids are ranked by cosine similarity to the normalized class
    centroid (ties by chunk_id), so representatives are simply the first
    n_repr of them.
    """
    if len(chunks) != len(assignment.labels) or len(chunks) != len(vectors):
        raise ValueError("chunks, assignment, and vectors must be aligned")
    model = fit_ctfidf(chunks, assignment)
    labels = np.asarray(assignment.labels)
    vectors = np.asarray(vectors, dtype=np.float64)

    topics: list[Topic] = []
    for class_id in range(assignment.num_clusters):
        member_idx = np.where(labels == class_id)[0]
        scores = class_scores(model, class_id)
        col = np.asarray(model.counts[:, class_id].todense()).ravel()
        candidates = np.where(col > 0)[0]
        # Stable sort on descending score keeps the (sorted) vocabulary's
        # lexicographic order among ties.
        ranked = candidates[np.argsort(-scores[candidates], kind="stable")]
        keywords = [
            (model.vocabulary[i], float(scores[i])) for i in ranked[:top_n]
        ]

        centroid = vectors[member_idx].mean(axis=0)
        norm = np.linalg.norm(centroid)
        if norm > 0.0:
            centroid = centroid / norm
        sims = vectors[member_idx] @ centroid
        ranked_members = sorted(
            zip(member_idx, sims), key=lambda pair: (-pair[1], chunks[pair[0]].chunk_id)
        )
        member_ids = [chunks[i].chunk_id for i, _ in ranked_members]

        topics.append(
            Topic(
                topic_id=class_id,
                keywords=keywords,
                representative_chunk_ids=member_ids[: max(n_repr, 0)],
                frequency=len(member_idx),
                member_chunk_ids=member_ids,
            )
        )

    topics.sort(key=lambda t: (-t.frequency, t.topic_id))
    return TopicSet(topics=topics, noise_count=int((labels == -1).sum()))


def topic_set_to_dict(topic_set: TopicSet) -> dict:
    return {
        "topics": [
            {
                "topic_id": t.topic_id,
                "keywords": [[term, score] for term, score in t.keywords],
                "representative_chunk_ids": t.representative_chunk_ids,
                "frequency": t.frequency,
                "member_chunk_ids": t.member_chunk_ids,
            }
            for t in topic_set.topics
        ],
        "noise_count": topic_set.noise_count,
    }


def topic_set_from_dict(data: dict) -> TopicSet:
    topics = [
        Topic(
            topic_id=row["topic_id"],
            keywords=[(term, float(score)) for term, score in row["keywords"]],
            representative_chunk_ids=list(row["representative_chunk_ids"]),
            frequency=row["frequency"],
            member_chunk_ids=list(row["member_chunk_ids"]),
        )
        for row in data["topics"]
    ]
    return TopicSet(topics=topics, noise_count=data["noise_count"])


def save_topic_set(topic_set: TopicSet, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(topic_set_to_dict(topic_set), indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def load_topic_set(path: str | Path) -> TopicSet:
    return topic_set_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
