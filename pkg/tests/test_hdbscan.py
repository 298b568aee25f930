"""Density clustering against brute-force oracles and the committed fixture.

Oracles are deliberately independent code paths: core distances by a plain
per-point scan, MST weight by a pure-Python Prim over the same graph, and a
scipy cross-check of the MST total.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import pytest
from scipy.sparse.csgraph import minimum_spanning_tree as scipy_mst

from textlens.cluster.density import (
    ClusterAssignment,
    HdbscanConfig,
    compute_stability,
    condense_tree,
    condensed_tree_dump,
    core_distances,
    hdbscan,
    minimum_spanning_tree,
    mutual_reachability,
    pairwise_distances,
    single_linkage,
)

FIXTURE = Path(__file__).parent / "fixtures" / "hdbscan_two_blobs.json"


def oracle_core_distances(points: np.ndarray, min_samples: int) -> np.ndarray:
    """Per-point scan: sort all distances (self included), take the k-th."""
    n = len(points)
    out = np.zeros(n)
    for i in range(n):
        dists = sorted(math.dist(points[i], points[j]) for j in range(n))
        out[i] = dists[min_samples - 1]
    return out


def oracle_mst_weight(graph: np.ndarray) -> float:
    """Pure-Python Prim, O(n^2), no shared code with the implementation."""
    n = graph.shape[0]
    visited = [False] * n
    key = [math.inf] * n
    key[0] = 0.0
    total = 0.0
    for _ in range(n):
        best = min((k, i) for i, k in enumerate(key) if not visited[i])
        total += best[0]
        visited[best[1]] = True
        for j in range(n):
            if not visited[j] and graph[best[1]][j] < key[j]:
                key[j] = graph[best[1]][j]
    return total


@pytest.fixture(scope="module")
def two_blobs():
    data = json.loads(FIXTURE.read_text())
    return data, np.asarray(data["points"])


class TestPieces:
    def test_core_distances_match_oracle_exactly(self):
        rng = np.random.default_rng(11)
        points = rng.normal(size=(60, 3))
        distances = pairwise_distances(points)
        for min_samples in (1, 4, 15):
            mine = core_distances(distances, min_samples)
            oracle = oracle_core_distances(points, min_samples)
            assert np.max(np.abs(mine - oracle)) < 1e-12

    def test_min_samples_one_is_zero_core(self):
        points = np.random.default_rng(0).normal(size=(10, 2))
        assert np.all(core_distances(pairwise_distances(points), 1) == 0.0)

    def test_mutual_reachability_definition(self):
        rng = np.random.default_rng(12)
        points = rng.normal(size=(20, 2))
        distances = pairwise_distances(points)
        core = core_distances(distances, 3)
        reach = mutual_reachability(distances, core)
        for i in range(20):
            for j in range(20):
                assert reach[i, j] == max(core[i], core[j], distances[i, j])

    def test_mst_weight_matches_prim_oracle(self):
        rng = np.random.default_rng(13)
        points = rng.normal(size=(80, 4))
        distances = pairwise_distances(points)
        core = core_distances(distances, 5)
        reach = mutual_reachability(distances, core)
        edges = minimum_spanning_tree(reach)
        assert abs(edges[:, 2].sum() - oracle_mst_weight(reach)) < 1e-9

    def test_mst_weight_matches_scipy(self):
        rng = np.random.default_rng(14)
        points = rng.normal(size=(50, 3))
        reach = mutual_reachability(
            pairwise_distances(points),
            core_distances(pairwise_distances(points), 4),
        )
        edges = minimum_spanning_tree(reach)
        assert abs(edges[:, 2].sum() - scipy_mst(reach).sum()) < 1e-9

    def test_mst_is_spanning(self):
        rng = np.random.default_rng(15)
        graph = pairwise_distances(rng.normal(size=(30, 2)))
        edges = minimum_spanning_tree(graph)
        touched = set(edges[:, 0].astype(int)) | set(edges[:, 1].astype(int))
        assert touched == set(range(30))

    def test_single_linkage_sizes(self):
        rng = np.random.default_rng(16)
        graph = pairwise_distances(rng.normal(size=(12, 2)))
        linkage = single_linkage(minimum_spanning_tree(graph), 12)
        assert linkage.shape == (11, 4)
        assert linkage[-1, 3] == 12  # final merge holds everything
        assert np.all(np.diff(linkage[:, 2]) >= 0)  # non-decreasing heights


class TestHdbscanFixtures:
    def test_two_blob_reference_labeling(self, two_blobs):
        data, points = two_blobs
        cfg = HdbscanConfig(min_cluster_size=data["min_cluster_size"])
        assignment = hdbscan(points, cfg)
        assert assignment.num_clusters == data["expected_num_clusters"]
        assert assignment.labels.tolist() == data["expected_labels"]
        assert assignment.labels[-1] == -1  # the far outlier
        assert assignment.probabilities[-1] == 0.0

    def test_all_noise_when_fewer_points_than_min_cluster_size(self):
        points = np.random.default_rng(17).normal(size=(5, 2))
        assignment = hdbscan(points, HdbscanConfig(min_cluster_size=15))
        assert assignment.num_clusters == 0
        assert assignment.labels.tolist() == [-1] * 5
        assert assignment.probabilities.tolist() == [0.0] * 5

    def test_identical_points_single_root_cluster(self):
        points = np.zeros((30, 2))
        assignment = hdbscan(points, HdbscanConfig(min_cluster_size=10))
        assert assignment.num_clusters == 1
        assert set(assignment.labels.tolist()) == {0}
        assert set(assignment.probabilities.tolist()) == {1.0}

    def test_cluster_size_floor(self):
        rng = np.random.default_rng(18)
        points = np.vstack(
            [rng.normal((c * 15, 0), 0.8, size=(18, 2)) for c in range(3)]
        )
        assignment = hdbscan(points, HdbscanConfig(min_cluster_size=12))
        for cluster in range(assignment.num_clusters):
            assert int((assignment.labels == cluster).sum()) >= 12

    def test_probabilities_in_range_and_noise_zero(self, two_blobs):
        _, points = two_blobs
        assignment = hdbscan(points, HdbscanConfig(min_cluster_size=10))
        assert np.all(assignment.probabilities >= 0.0)
        assert np.all(assignment.probabilities <= 1.0)
        noise = assignment.labels == -1
        assert np.all(assignment.probabilities[noise] == 0.0)
        # every selected cluster has a full-confidence core point
        for cluster in range(assignment.num_clusters):
            assert assignment.probabilities[assignment.labels == cluster].max() == 1.0


class TestInvariances:
    def test_permutation_equivariance(self, two_blobs):
        _, points = two_blobs
        cfg = HdbscanConfig(min_cluster_size=10)
        base = hdbscan(points, cfg)
        rng = np.random.default_rng(19)
        perm = rng.permutation(len(points))
        permuted = hdbscan(points[perm], cfg)
        # Renumbering is by first member index, so compare partitions directly.
        base_on_perm = base.labels[perm]
        mapping = {}
        for mine, ref in zip(permuted.labels, base_on_perm):
            if mine == -1 or ref == -1:
                assert mine == ref
                continue
            assert mapping.setdefault(int(mine), int(ref)) == int(ref)

    def test_isometry_invariance(self, two_blobs):
        _, points = two_blobs
        cfg = HdbscanConfig(min_cluster_size=10)
        base = hdbscan(points, cfg)
        theta = 0.7
        rotation = np.array(
            [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
        )
        moved = points @ rotation.T + np.array([5.0, -3.0])
        transformed = hdbscan(moved, cfg)
        assert transformed.labels.tolist() == base.labels.tolist()

    def test_config_validation(self):
        with pytest.raises(ValueError):
            HdbscanConfig(min_cluster_size=1)
        with pytest.raises(ValueError):
            HdbscanConfig(min_cluster_size=5, min_samples=6)
        with pytest.raises(ValueError):
            HdbscanConfig(min_cluster_size=5, min_samples=0)
        assert HdbscanConfig(min_cluster_size=7).min_samples == 7


class TestCondensedTree:
    def test_dump_structure(self, two_blobs):
        _, points = two_blobs
        distances = pairwise_distances(points)
        core = core_distances(distances, 10)
        reach = mutual_reachability(distances, core)
        linkage = single_linkage(minimum_spanning_tree(reach), len(points))
        tree = condense_tree(linkage, len(points), 10)
        dump = condensed_tree_dump(tree)
        assert json.dumps(dump)  # JSON-serializable, no inf leaks
        roots = [n for n in dump if n["parent"] is None]
        assert len(roots) == 1
        assert roots[0]["size"] == len(points)
        assert all(n["stability"] is None or n["stability"] >= 0 for n in dump)

    def test_stability_accounts_every_point_once(self, two_blobs):
        _, points = two_blobs
        distances = pairwise_distances(points)
        reach = mutual_reachability(distances, core_distances(distances, 10))
        linkage = single_linkage(minimum_spanning_tree(reach), len(points))
        tree = condense_tree(linkage, len(points), 10)
        point_rows = tree.child < tree.num_points
        assert sorted(tree.child[point_rows].tolist()) == list(range(len(points)))
        assert compute_stability(tree)[tree.root] >= 0.0
