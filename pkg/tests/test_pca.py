"""PCA reducer against dense eigendecomposition oracles."""

from __future__ import annotations

import numpy as np
import pytest

from textlens.cluster.pca import (
    METHOD_NONE,
    ReducerConfig,
    fit_pca,
    reduce,
)
from textlens.errors import ConfigError


class TestReduce:
    def test_planar_points_reconstruct_exactly(self):
        rng = np.random.default_rng(1)
        basis = np.linalg.qr(rng.normal(size=(10, 2)))[0]  # 2-plane in R^10
        coeffs = rng.normal(size=(40, 2))
        points = coeffs @ basis.T
        model = fit_pca(points, 2)
        projected = (points - model.mean) @ model.components.T
        reconstructed = projected @ model.components + model.mean
        assert np.max(np.abs(reconstructed - points)) < 1e-9

    def test_method_none_is_identity(self):
        rng = np.random.default_rng(2)
        points = rng.normal(size=(12, 6))
        out = reduce(points, ReducerConfig(method=METHOD_NONE, target_dim=3))
        assert np.array_equal(out, points)

    def test_projected_variance_matches_eigenvalue_oracle(self):
        rng = np.random.default_rng(3)
        points = rng.normal(size=(50, 384))
        out = reduce(points, ReducerConfig(target_dim=5))
        projected_variance = out.var(axis=0, ddof=1).sum()
        # Independent oracle: eigenvalues of the explicitly formed covariance.
        centered = points - points.mean(axis=0)
        cov = centered.T @ centered / (points.shape[0] - 1)
        top5 = np.sort(np.linalg.eigvalsh(cov))[-5:].sum()
        assert abs(projected_variance - top5) / top5 < 1e-6

    def test_components_orthonormal(self):
        rng = np.random.default_rng(4)
        model = fit_pca(rng.normal(size=(30, 20)), 6)
        gram = model.components @ model.components.T
        assert np.max(np.abs(gram - np.eye(6))) < 1e-9

    def test_sign_convention_deterministic(self):
        rng = np.random.default_rng(5)
        points = rng.normal(size=(25, 10))
        a = reduce(points, ReducerConfig(target_dim=4))
        b = reduce(points.copy(), ReducerConfig(target_dim=4))
        assert np.array_equal(a, b)
        for row in fit_pca(points, 4).components:
            assert row[np.argmax(np.abs(row))] > 0

    def test_order_preserved(self):
        rng = np.random.default_rng(6)
        points = rng.normal(size=(20, 8))
        out = reduce(points, ReducerConfig(target_dim=3))
        flipped = reduce(points[::-1], ReducerConfig(target_dim=3))
        assert np.allclose(out[::-1], flipped, atol=1e-12)

    def test_target_dim_too_large_is_config_error(self):
        points = np.random.default_rng(7).normal(size=(10, 4))
        with pytest.raises(ConfigError):
            reduce(points, ReducerConfig(target_dim=4))

    def test_needs_two_vectors(self):
        with pytest.raises(ValueError):
            reduce(np.ones((1, 5)), ReducerConfig(target_dim=2))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ReducerConfig(method="umap")
        with pytest.raises(ValueError):
            ReducerConfig(target_dim=0)
