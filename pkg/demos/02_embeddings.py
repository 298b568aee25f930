"""Deterministic offline embeddings
===================================

The local provider feature-hashes tokens and character trigrams into a unit
vector.  It is a pure function of (text, dim): the same text embeds to the
same bits on every machine, which is what makes the whole pipeline testable
with no model weights and no network.

A remote provider speaking the common embeddings-API JSON shape can be
swapped in through the same config surface (see README).
"""

import numpy as np

from textlens.embed import ProviderConfig, embed_texts, local_deterministic_embed

provider = ProviderConfig(kind="local-deterministic", dim=384)

texts = [
    "wheat prices climbed on strong export demand",
    "export demand lifted wheat prices",
    "hydraulic pumps on older tractors lose pressure",
]
vectors = embed_texts(provider, texts)
print("shape:", vectors.shape, "norms:", np.round(np.linalg.norm(vectors, axis=1), 8))

sim = vectors @ vectors.T
print("\ncosine similarity matrix:")
for i, row in enumerate(sim):
    print(f"  text{i}:", np.round(row, 3))
print("\nrelated sentences score high; the machinery sentence stays low.")

# Determinism: bitwise identical across calls.
a = local_deterministic_embed("grain silo", 384)
b = local_deterministic_embed("grain silo", 384)
print("\nbitwise reproducible:", a.tobytes() == b.tobytes())

# Bag-of-features: token order does not matter.
print(
    "order-insensitive:",
    np.array_equal(
        local_deterministic_embed("wheat prices", 384),
        local_deterministic_embed("prices wheat", 384),
    ),
)
