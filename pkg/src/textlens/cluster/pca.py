"""Deterministic PCA reducer behind the pluggable reducer contract.

The pipeline only requires *a* dimensionality reducer ahead of density
clustering; PCA is the built-in because it is deterministic and exactly
testable against a dense eigendecomposition.  The contract (reduce(vectors,
cfg) -> points, order preserved) admits other reducers without interface
change.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError

METHOD_PCA = "pca"
METHOD_NONE = "none"


@dataclass(frozen=True)
class ReducerConfig:
    method: str = METHOD_PCA
    target_dim: int = 5
    random_seed: int = 0  # reserved for stochastic reducers; PCA ignores it

    def __post_init__(self) -> None:
        if self.method not in (METHOD_PCA, METHOD_NONE):
            raise ValueError(f"unknown reducer method: {self.method!r}")
        if self.target_dim < 1:
            raise ValueError(f"target_dim must be >= 1, got {self.target_dim}")


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray          # (d,)
    components: np.ndarray    # (k, d), orthonormal rows
    eigenvalues: np.ndarray   # (k,), descending


def fit_pca(vectors: np.ndarray, target_dim: int) -> PcaModel:
    """Top-k principal directions of the sample covariance (ddof=1).

    Sign convention: each component's largest-magnitude loading is positive,
    which pins the otherwise arbitrary eigenvector signs.
    """
    x = np.asarray(vectors, dtype=np.float64)
    n, d = x.shape
    if n < 2:
        raise ValueError(f"PCA needs at least 2 vectors, got {n}")
    if target_dim >= d:
        raise ConfigError(f"target_dim {target_dim} must be < input dim {d}")
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / (n - 1)
    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    order = np.argsort(eigenvalues)[::-1][:target_dim]
    components = eigenvectors[:, order].T.copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return PcaModel(
        mean=mean,
        components=components,
        eigenvalues=eigenvalues[order].copy(),
    )


def reduce(vectors: np.ndarray, cfg: ReducerConfig) -> np.ndarray:
    """Project vectors to cfg.target_dim dimensions; order preserved.

    method "none" returns the input unchanged (as float64).
    """
    x = np.asarray(vectors, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-D matrix of vectors, got shape {x.shape}")
    if cfg.method == METHOD_NONE:
        return x.copy()
    model = fit_pca(x, cfg.target_dim)
    return (x - model.mean) @ model.components.T
