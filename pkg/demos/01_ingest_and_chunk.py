"""Cleaning, sentence splitting, and chunking
=============================================

Every document entering the pipeline is normalized (lowercase, collapsed
whitespace, a fixed retained-punctuation set), split into sentences with a
rule-based boundary detector, and regrouped into word-limited chunks whose
IDs trace back to the source file.
"""

from pathlib import Path

from textlens.ingest import (
    ChunkingConfig,
    chunk_corpus,
    clean_text,
    load_corpus,
    split_sentences,
)

CORPUS = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "corpus60"

# Cleaning collapses noise without touching sentence-terminal punctuation.
messy = "  Corn\t PRICES rose 2%!!!  Markets (mostly) calm. "
print("raw:    ", repr(messy))
print("cleaned:", repr(clean_text(messy)))
print()

# Sentence boundaries skip decimals and known abbreviations.
text = clean_text("U.S. exports fell 2.5 tons. Dr. Ames disagreed. Prices rose.")
for i, sentence in enumerate(split_sentences(text), start=1):
    print(f"sentence {i}: {sentence}")
print()

# Chunking groups sentences until the word limit; joining chunk texts with
# single spaces reconstructs the cleaned document exactly.
loaded = load_corpus(CORPUS)
print(f"loaded {len(loaded.documents)} documents ({loaded.skipped} skipped)")
chunks = chunk_corpus(loaded.documents, ChunkingConfig(word_limit=40))
print(f"chunked into {len(chunks)} chunks; first three:")
for chunk in chunks[:3]:
    print(f"  {chunk.chunk_id:20s} {chunk.word_count:3d} words: {chunk.text[:50]}...")

doc = loaded.documents[0]
rebuilt = " ".join(c.text for c in chunks if c.doc_id == doc.doc_id)
print("\nreconstruction exact:", rebuilt == doc.clean_text)
