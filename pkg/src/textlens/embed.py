"""Embedding providers: a remote HTTP client and a deterministic offline one.

Every vector leaving this module is unit-normalized float64, so cosine
similarity downstream reduces to a dot product.  The offline provider is a
feature-hashing scheme that is a pure function of (text, dim): stable across
runs, platforms, and process restarts, which is what lets the whole pipeline
run and be tested with zero network access and zero model weights.
"""

from __future__ import annotations

import hashlib
import random
import time
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._http import Transport, post_json_with_retries
from .errors import ContractViolationError
from .ingest import Chunk

DEFAULT_DIM = 384

LOCAL_KIND = "local-deterministic"
REMOTE_KIND = "remote"


@dataclass(frozen=True)
class ProviderConfig:
    kind: str = LOCAL_KIND
    endpoint_url: str = ""
    model_name: str = "hash-v1"
    dim: int = DEFAULT_DIM
    batch_size: int = 64
    timeout: float = 30.0
    max_retries: int = 3
    max_concurrency: int = 1  # in-flight request cap for the remote client
    api_key: str = ""

    def __post_init__(self) -> None:
        if self.kind not in (LOCAL_KIND, REMOTE_KIND):
            raise ValueError(f"unknown provider kind: {self.kind!r}")
        if self.dim < 2:
            raise ValueError(f"dim must be >= 2, got {self.dim}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.max_concurrency < 1:
            raise ValueError(f"max_concurrency must be >= 1, got {self.max_concurrency}")
        if self.kind == REMOTE_KIND and not self.endpoint_url:
            raise ValueError("remote provider requires endpoint_url")


@dataclass(frozen=True)
class EmbeddedChunk:
    chunk: Chunk
    vector: np.ndarray  # unit-normalized, shape (dim,)


def _hash64(data: bytes) -> int:
    """Stable 64-bit hash (blake2b truncation); never Python's salted hash()."""
    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "little")


def _token_features(token: str) -> list[str]:
    feats = [token]
    if len(token) >= 3:
        feats.extend(token[i : i + 3] for i in range(len(token) - 2))
    return feats


def local_deterministic_embed(text: str, dim: int) -> np.ndarray:
    """Feature-hash a text into a unit vector.

    Each whitespace token and each of its character trigrams selects a
    coordinate (hash mod dim) and a sign (hash bit 63).  Inputs with no tokens
    map to e_1 by convention, as does the (pathological) all-cancelling case.
    """
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    vec = np.zeros(dim, dtype=np.float64)
    tokens = text.split()
    for token in tokens:
        for feat in _token_features(token):
            h = _hash64(feat.encode("utf-8"))
            sign = -1.0 if (h >> 63) & 1 else 1.0
            vec[h % dim] += sign
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        vec[0] = 1.0
        return vec
    return vec / norm


def unit_rows(matrix: np.ndarray) -> np.ndarray:
    """Re-normalize each row to unit length (zero rows map to e_1)."""
    matrix = np.asarray(matrix, dtype=np.float64)
    norms = np.linalg.norm(matrix, axis=1)
    zero = norms == 0.0
    if zero.any():
        matrix = matrix.copy()
        matrix[zero, 0] = 1.0
        norms = np.linalg.norm(matrix, axis=1)
    return matrix / norms[:, None]


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity of two vectors (not assumed normalized)."""
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


class RemoteEmbeddingClient:
    """Client for the common embeddings-API wire shape.

    Request: ``{"model": ..., "input": [texts]}``; response: ``{"data":
    [{"index": i, "embedding": [...]}, ...]}``.  Bearer auth when a key is
    configured.  Retries are duplicate-safe because embedding is idempotent.
    """

    def __init__(
        self,
        config: ProviderConfig,
        transport: Transport | None = None,
        sleep: Callable[[float], None] = time.sleep,
        rng: random.Random | None = None,
    ):
        self.config = config
        self._transport = transport
        self._sleep = sleep
        self._rng = rng

    def _headers(self) -> dict:
        headers = {}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        return headers

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        body = post_json_with_retries(
            self.config.endpoint_url,
            {"model": self.config.model_name, "input": list(texts)},
            headers=self._headers(),
            timeout=self.config.timeout,
            max_retries=self.config.max_retries,
            transport=self._transport,
            sleep=self._sleep,
            rng=self._rng,
        )
        data = body.get("data")
        if not isinstance(data, list) or len(data) != len(texts):
            raise ContractViolationError(
                f"provider returned {len(data) if isinstance(data, list) else 'no'} "
                f"vectors for {len(texts)} inputs"
            )
        rows = sorted(data, key=lambda row: row.get("index", 0))
        matrix = np.asarray([row["embedding"] for row in rows], dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[1] != self.config.dim:
            got = matrix.shape[1] if matrix.ndim == 2 else "ragged"
            raise ContractViolationError(
                f"provider returned dim {got}, config requires {self.config.dim}"
            )
        if not np.isfinite(matrix).all():
            raise ContractViolationError("provider returned non-finite values")
        return matrix


def embed_texts(
    provider: ProviderConfig,
    texts: Sequence[str],
    *,
    transport: Transport | None = None,
    sleep: Callable[[float], None] = time.sleep,
    rng: random.Random | None = None,
) -> np.ndarray:
    """Embed texts in order, returning a unit-row matrix of shape (n, dim).

    Output is invariant to how the input is split into batches.
    """
    if not texts:
        raise ValueError("texts must be non-empty")
    if any(not t for t in texts):
        raise ValueError("every text must be non-empty")
    if provider.kind == LOCAL_KIND:
        matrix = np.stack([local_deterministic_embed(t, provider.dim) for t in texts])
        return unit_rows(matrix)
    client = RemoteEmbeddingClient(provider, transport=transport, sleep=sleep, rng=rng)
    groups = [
        texts[i : i + provider.batch_size]
        for i in range(0, len(texts), provider.batch_size)
    ]
    if provider.max_concurrency > 1 and len(groups) > 1:
        # Bounded fan-out; results keyed by batch position so output order
        # never depends on completion order.
        from concurrent.futures import ThreadPoolExecutor

        workers = min(provider.max_concurrency, len(groups))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(client.embed_batch, groups))
    else:
        batches = [client.embed_batch(group) for group in groups]
    return unit_rows(np.vstack(batches))


def embed_chunks(
    provider: ProviderConfig,
    chunks: Sequence[Chunk],
    *,
    transport: Transport | None = None,
) -> list[EmbeddedChunk]:
    """Embed chunk texts and pair each chunk with its vector."""
    matrix = embed_texts(provider, [c.text for c in chunks], transport=transport)
    return [EmbeddedChunk(chunk=c, vector=matrix[i]) for i, c in enumerate(chunks)]
