"""Exact top-k retrieval and the binary index format
====================================================

Chunk vectors live in an append-only index; a query embeds with the same
provider and retrieval is an exact cosine top-k (dot products of unit
vectors, float64 accumulation, ties broken by chunk_id).  The index persists
to a single binary file with a CRC32 trailer; save/load round-trips
bit-exactly.
"""

import tempfile
from pathlib import Path

from textlens.embed import EmbeddedChunk, ProviderConfig, embed_texts
from textlens.index import Query, VectorIndex
from textlens.ingest import ChunkingConfig, chunk_corpus, load_corpus

CORPUS = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "corpus60"

provider = ProviderConfig(dim=384)
chunks = chunk_corpus(load_corpus(CORPUS).documents, ChunkingConfig(word_limit=40))
vectors = embed_texts(provider, [c.text for c in chunks])

index = VectorIndex(dim=384)
index.upsert(EmbeddedChunk(chunk=c, vector=vectors[i]) for i, c in enumerate(chunks))
print(f"indexed {len(index)} chunks at dim {index.dim}")

query_text = "tractor engine maintenance"
query_vec = embed_texts(provider, [query_text])[0]
result = index.search(Query(text=query_text, vector=query_vec, k=3))
print(f"\ntop 3 for {query_text!r}:")
for rank, hit in enumerate(result.hits, start=1):
    print(f"  {rank}. {hit.score:.4f}  {hit.chunk_id:22s} {hit.text[:48]}...")

# Persistence: magic + header + JSON metadata + float32 vectors + CRC32.
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "demo.lens"
    index.save(path)
    print(f"\nsaved {path.stat().st_size} bytes")
    loaded = VectorIndex.load(path)
    again = loaded.search(Query(text=query_text, vector=query_vec, k=3))
    print("identical results after round-trip:", again.hits == result.hits)
