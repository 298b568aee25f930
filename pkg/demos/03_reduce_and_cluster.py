"""PCA reduction and density clustering
=======================================

High-dimensional chunk embeddings are projected to a few principal
components, then clustered with HDBSCAN: core distances, mutual-reachability
MST, single-linkage hierarchy, condensation at min_cluster_size, and
excess-of-mass cluster selection.  Points in no dense region get label -1.
"""

import json
from pathlib import Path

import numpy as np

from textlens.cluster import density, pca
from textlens.embed import ProviderConfig, embed_texts
from textlens.ingest import ChunkingConfig, chunk_corpus, load_corpus

CORPUS = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "corpus60"

chunks = chunk_corpus(load_corpus(CORPUS).documents, ChunkingConfig(word_limit=40))
vectors = embed_texts(ProviderConfig(dim=384), [c.text for c in chunks])

reduced = pca.reduce(vectors, pca.ReducerConfig(method="pca", target_dim=5))
print(f"reduced {vectors.shape} -> {reduced.shape}")

assignment = density.hdbscan(reduced, density.HdbscanConfig(min_cluster_size=10))
print(f"clusters: {assignment.num_clusters}, noise points: {(assignment.labels == -1).sum()}")
for cluster in range(assignment.num_clusters):
    members = [c.chunk_id for c, l in zip(chunks, assignment.labels) if l == cluster]
    print(f"  cluster {cluster}: {len(members)} chunks, e.g. {members[:3]}")

# The condensed tree behind the selection, as the debug dump the tests use.
distances = density.pairwise_distances(reduced)
reach = density.mutual_reachability(distances, density.core_distances(distances, 10))
linkage = density.single_linkage(density.minimum_spanning_tree(reach), len(reduced))
tree = density.condense_tree(linkage, len(reduced), 10)
print("\ncondensed tree nodes:")
print(json.dumps(density.condensed_tree_dump(tree), indent=2)[:600], "...")

# Membership probabilities: 1.0 at cluster cores, 0.0 for noise.
probs = np.round(assignment.probabilities, 2)
print("\nprobability range per cluster:")
for cluster in range(assignment.num_clusters):
    mask = assignment.labels == cluster
    print(f"  cluster {cluster}: min {probs[mask].min()}, max {probs[mask].max()}")
