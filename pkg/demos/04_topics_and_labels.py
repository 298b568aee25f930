"""Keyword extraction and zero-shot labeling
============================================

Each cluster becomes a Topic: its top c-TF-IDF keywords (term frequency
within the cluster, discounted by how many clusters contain the term) and
its centroid-nearest representative chunks.  A structured prompt --
instruction, keywords, snippets -- asks a text-generation provider for a
short human-readable label; the offline stub derives one from the keywords.
"""

from pathlib import Path

from textlens.cluster import density, pca
from textlens.embed import ProviderConfig, embed_texts
from textlens.ingest import ChunkingConfig, chunk_corpus, load_corpus
from textlens.label import GenProviderConfig, PromptTemplate, label_topic_set, render_prompt
from textlens.topics import build_topics

CORPUS = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "corpus60"

chunks = chunk_corpus(load_corpus(CORPUS).documents, ChunkingConfig(word_limit=40))
vectors = embed_texts(ProviderConfig(dim=384), [c.text for c in chunks])
reduced = pca.reduce(vectors, pca.ReducerConfig(target_dim=5))
assignment = density.hdbscan(reduced, density.HdbscanConfig(min_cluster_size=10))

topic_set = build_topics(chunks, assignment, vectors, top_n=8, n_repr=2)
for topic in topic_set.topics:
    terms = ", ".join(f"{t} ({s:.3f})" for t, s in topic.keywords[:5])
    print(f"topic {topic.topic_id} ({topic.frequency} chunks): {terms}")
    print(f"  representatives: {topic.representative_chunk_ids}")
print()

chunks_by_id = {c.chunk_id: c.text for c in chunks}
template = PromptTemplate()
prompt = render_prompt(topic_set.topics[0], chunks_by_id, template)
print("rendered prompt for the largest topic:")
print("-" * 60)
print(prompt[:400], "...")
print("-" * 60)

labels = label_topic_set(topic_set, GenProviderConfig(kind="stub"), template, chunks_by_id)
print("\ngenerated labels:")
for lb in labels:
    flag = " (stub fallback)" if lb.flagged else ""
    print(f"  topic {lb.topic_id}: {lb.label}{flag}")
