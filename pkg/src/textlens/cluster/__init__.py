"""Dimensionality reduction and density clustering."""

from .density import (
    ClusterAssignment,
    CondensedTree,
    HdbscanConfig,
    compute_stability,
    condense_tree,
    condensed_tree_dump,
    core_distances,
    hdbscan,
    minimum_spanning_tree,
    mutual_reachability,
    pairwise_distances,
    select_clusters,
    single_linkage,
)
from .pca import METHOD_NONE, METHOD_PCA, PcaModel, ReducerConfig, fit_pca, reduce

__all__ = [
    "ClusterAssignment",
    "CondensedTree",
    "HdbscanConfig",
    "METHOD_NONE",
    "METHOD_PCA",
    "PcaModel",
    "ReducerConfig",
    "compute_stability",
    "condense_tree",
    "condensed_tree_dump",
    "core_distances",
    "fit_pca",
    "hdbscan",
    "minimum_spanning_tree",
    "mutual_reachability",
    "pairwise_distances",
    "reduce",
    "select_clusters",
    "single_linkage",
]
