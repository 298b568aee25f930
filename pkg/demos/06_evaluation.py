"""Label quality metrics and the evaluation report
==================================================

Per topic: factuality (share of label content words found in the topic's top
documents), document coverage (share of those documents containing at least
one label word), semantic alignment (cosine between the embedded label and
the embedded keywords), and a hallucination flag for fluent-but-ungrounded
labels (alignment > 0.7 with factuality < 0.3, both strict).
"""

from textlens.embed import ProviderConfig
from textlens.evalkit import (
    build_report,
    coverage_score,
    factuality_score,
    render_text_table,
)
from textlens.topics import Topic, TopicSet

provider = ProviderConfig(dim=384)

docs = [
    "wheat prices rose after the harvest report.",
    "grain exports kept wheat demand strong.",
    "rainfall slowed the wheat harvest this week.",
]
print("factuality('Wheat Harvest Outlook'):", factuality_score("Wheat Harvest Outlook", docs))
print("factuality('Quantum Entanglement'):  ", factuality_score("Quantum Entanglement", docs))
print("coverage('Wheat Harvest'):           ", coverage_score("Wheat Harvest", docs))
print()

topic = Topic(
    topic_id=0,
    keywords=[(t, 1.0) for t in ["wheat", "harvest", "prices", "grain"]],
    representative_chunk_ids=["d_chunk1"],
    frequency=3,
    member_chunk_ids=["d_chunk1", "d_chunk2", "d_chunk3"],
)
topic_set = TopicSet(topics=[topic], noise_count=0)
texts_by_id = {f"d_chunk{i + 1}": doc for i, doc in enumerate(docs)}

# A grounded label vs. a fluent-sounding but unrelated one.
for label in ["Wheat Harvest Prices", "Celebrity Fashion Trends"]:
    report = build_report(topic_set, {0: label}, texts_by_id, provider)
    ev = report.per_topic[0]
    print(
        f"label {label!r}: alignment={ev.alignment:.3f} "
        f"factuality={ev.factuality:.2f} coverage={ev.coverage:.2f} "
        f"hallucination={ev.hallucination}"
    )

print()
report = build_report(topic_set, {0: "Wheat Harvest Prices"}, texts_by_id, provider)
print(render_text_table(report, {0: "Wheat Harvest Prices"}))
