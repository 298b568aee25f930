"""Label and retrieval quality metrics, aggregated into a report.

Per topic: semantic alignment (cosine between the embedded label and the
embedded comma-joined keywords), factuality (fraction of the label's content
words found as tokens in the topic's top documents), document coverage
(fraction of those documents containing at least one label word), and a
hallucination flag for labels that align well (> 0.7) yet are poorly grounded
(factuality < 0.3) — both inequalities strict.

Label words use the same tokenization as keyword extraction (lowercase, edge
punctuation stripped, stop words and single characters dropped, set
semantics); matching against documents is exact-token.  BERTScore needs an
external pretrained model, so the report only accepts values from a sidecar
file and never computes them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .embed import ProviderConfig, embed_texts
from .errors import LensError
from .topics import TopicSet, token_set, tokenize

ALIGNMENT_THRESHOLD = 0.7
FACTUALITY_THRESHOLD = 0.3


@dataclass
class TopicEval:
    topic_id: int
    alignment: float | None
    factuality: float | None
    coverage: float | None
    hallucination: bool
    bert_score_f1: float | None = None
    flags: list[str] = field(default_factory=list)


@dataclass
class EvalReport:
    per_topic: list[TopicEval]
    mean_alignment: float | None
    mean_factuality: float | None
    mean_coverage: float | None
    hallucination_count: int
    metric_failures: int = 0
    human_scores: dict | None = None


def label_content_words(label: str) -> list[str]:
    """Unique content words of a label, insertion order preserved."""
    seen: dict[str, None] = {}
    for token in tokenize(label.lower()):
        seen.setdefault(token)
    return list(seen)


def factuality_score(label: str, topic_docs: Sequence[str]) -> float:
    """Fraction of the label's content words occurring as tokens in the docs.

    Degenerate inputs (no content words, no documents) score 0.
    """
    if not label:
        raise ValueError("label must be non-empty")
    words = label_content_words(label)
    if not words or not topic_docs:
        return 0.0
    doc_tokens: set[str] = set()
    for doc in topic_docs:
        doc_tokens |= token_set(doc)
    found = sum(1 for w in words if w in doc_tokens)
    return found / len(words)


def coverage_score(label: str, top_docs: Sequence[str]) -> float:
    """Fraction of top documents containing at least one label content word."""
    if not top_docs:
        return 0.0
    words = set(label_content_words(label))
    if not words:
        return 0.0
    containing = sum(1 for doc in top_docs if words & token_set(doc))
    return containing / len(top_docs)


def alignment_score(
    label: str, keyword_terms: Sequence[str], provider: ProviderConfig
) -> float:
    """Cosine between the embedded label and the embedded joined keywords.

    Both sides are lowercased first: labels are title-cased and the offline
    hash embedder is case-sensitive.
    """
    representation = ", ".join(keyword_terms)
    if not label or not representation:
        raise ValueError("label and keywords must be non-empty")
    vectors = embed_texts(provider, [label.lower(), representation.lower()])
    return float(vectors[0] @ vectors[1])


def flag_hallucinations(evals: Sequence[TopicEval]) -> list[int]:
    """Topic ids with alignment > 0.7 and factuality < 0.3 (strict)."""
    return [
        ev.topic_id
        for ev in evals
        if ev.alignment is not None
        and ev.factuality is not None
        and ev.alignment > ALIGNMENT_THRESHOLD
        and ev.factuality < FACTUALITY_THRESHOLD
    ]


def _mean(values: list[float]) -> float | None:
    return sum(values) / len(values) if values else None


def build_report(
    topic_set: TopicSet,
    labels_by_id: Mapping[int, str],
    texts_by_id: Mapping[str, str],
    provider: ProviderConfig,
    coverage_m: int = 10,
) -> EvalReport:
    """Evaluate every topic against its label.

    The document set for factuality and coverage is the topic's top
    coverage_m centroid-ranked member chunks (clamped to membership).
    Per-topic metric failures are recorded as nulls, excluded from the means,
    and counted.
    """
    per_topic: list[TopicEval] = []
    failures = 0
    for topic in topic_set.topics:
        flags: list[str] = []
        label = labels_by_id.get(topic.topic_id)
        if label is None:
            per_topic.append(
                TopicEval(
                    topic_id=topic.topic_id,
                    alignment=None,
                    factuality=None,
                    coverage=None,
                    hallucination=False,
                    flags=["missing_label"],
                )
            )
            failures += 1
            continue

        top_ids = topic.member_chunk_ids[: max(coverage_m, 0)]
        top_docs = [texts_by_id[cid] for cid in top_ids if cid in texts_by_id]
        if len(top_docs) < len(top_ids):
            flags.append("missing_chunks")
        if not top_docs:
            flags.append("no_documents")
        if not label_content_words(label):
            flags.append("degenerate_label")

        alignment: float | None
        try:
            alignment = alignment_score(label, topic.keyword_terms(), provider)
        except (LensError, ValueError):
            alignment = None
            flags.append("alignment_failed")
            failures += 1

        factuality = factuality_score(label, top_docs)
        coverage = coverage_score(label, top_docs)
        hallucination = (
            alignment is not None
            and alignment > ALIGNMENT_THRESHOLD
            and factuality < FACTUALITY_THRESHOLD
        )
        per_topic.append(
            TopicEval(
                topic_id=topic.topic_id,
                alignment=alignment,
                factuality=factuality,
                coverage=coverage,
                hallucination=hallucination,
                flags=flags,
            )
        )

    report = EvalReport(
        per_topic=per_topic,
        mean_alignment=_mean([e.alignment for e in per_topic if e.alignment is not None]),
        mean_factuality=_mean([e.factuality for e in per_topic if e.factuality is not None]),
        mean_coverage=_mean([e.coverage for e in per_topic if e.coverage is not None]),
        hallucination_count=sum(1 for e in per_topic if e.hallucination),
        metric_failures=failures,
    )
    return report


def attach_bert_scores(report: EvalReport, scores_by_id: Mapping[int, float]) -> None:
    """Merge externally computed BERTScore F1 values into the report."""
    for ev in report.per_topic:
        if ev.topic_id in scores_by_id:
            ev.bert_score_f1 = float(scores_by_id[ev.topic_id])


def attach_human_scores(report: EvalReport, scores_by_id: Mapping[int, Mapping[str, float]]) -> None:
    """Import human-annotation scores ({topic_id: {criterion: value}}).

    Stores per-criterion means alongside the raw block.
    """
    # String topic-id keys: the block lives inside the JSON report.
    raw = {str(tid): dict(vals) for tid, vals in scores_by_id.items()}
    criteria: dict[str, list[float]] = {}
    for vals in raw.values():
        for criterion, value in vals.items():
            criteria.setdefault(criterion, []).append(float(value))
    report.human_scores = {
        "per_topic": raw,
        "means": {c: _mean(v) for c, v in sorted(criteria.items())},
    }


def report_to_dict(report: EvalReport) -> dict:
    return {
        "per_topic": [
            {
                "topic_id": ev.topic_id,
                "alignment": ev.alignment,
                "factuality": ev.factuality,
                "coverage": ev.coverage,
                "hallucination": ev.hallucination,
                "bert_score_f1": ev.bert_score_f1,
                "flags": ev.flags,
            }
            for ev in report.per_topic
        ],
        "means": {
            "alignment": report.mean_alignment,
            "factuality": report.mean_factuality,
            "coverage": report.mean_coverage,
        },
        "hallucination_count": report.hallucination_count,
        "metric_failures": report.metric_failures,
        "human_scores": report.human_scores,
    }


def report_from_dict(data: dict) -> EvalReport:
    per_topic = [
        TopicEval(
            topic_id=row["topic_id"],
            alignment=row["alignment"],
            factuality=row["factuality"],
            coverage=row["coverage"],
            hallucination=row["hallucination"],
            bert_score_f1=row.get("bert_score_f1"),
            flags=list(row.get("flags", [])),
        )
        for row in data["per_topic"]
    ]
    return EvalReport(
        per_topic=per_topic,
        mean_alignment=data["means"]["alignment"],
        mean_factuality=data["means"]["factuality"],
        mean_coverage=data["means"]["coverage"],
        hallucination_count=data["hallucination_count"],
        metric_failures=data.get("metric_failures", 0),
        human_scores=data.get("human_scores"),
    )


def save_report(report: EvalReport, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(report_to_dict(report), indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def load_report(path: str | Path) -> EvalReport:
    return report_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def render_text_table(report: EvalReport, labels_by_id: Mapping[int, str]) -> str:
    """Aligned plain-text view with one row per topic plus the means row."""
    headers = ["topic", "label", "alignment", "factuality", "coverage", "hallucination"]
    rows = []
    for ev in report.per_topic:
        rows.append(
            [
                str(ev.topic_id),
                labels_by_id.get(ev.topic_id, "-")[:40],
                "-" if ev.alignment is None else f"{ev.alignment:.4f}",
                "-" if ev.factuality is None else f"{ev.factuality:.4f}",
                "-" if ev.coverage is None else f"{ev.coverage:.4f}",
                "yes" if ev.hallucination else "no",
            ]
        )
    means = [
        "mean",
        "",
        "-" if report.mean_alignment is None else f"{report.mean_alignment:.4f}",
        "-" if report.mean_factuality is None else f"{report.mean_factuality:.4f}",
        "-" if report.mean_coverage is None else f"{report.mean_coverage:.4f}",
        str(report.hallucination_count),
    ]
    rows.append(means)
    widths = [max(len(headers[i]), *(len(r[i]) for r in rows)) for i in range(len(headers))]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        "  ".join("-" * w for w in widths),
    ]
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
    return "\n".join(lines) + "\n"
