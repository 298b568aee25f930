"""Exact top-k cosine retrieval over embedded chunks, with binary persistence.

Vectors are stored unit-normalized in float32; similarity scores accumulate in
float64 so tie-breaking stays stable.  Search is exact: a partial selection
narrows the candidates, then boundary ties resolve by ascending chunk_id, which
makes results element-for-element equal to a full sort.

On-disk layout (all integers little-endian):

    magic "LENSIDX1" (8 bytes)
    format version  u32
    dim             u32
    entry count     u64
    metadata length u64, then that many bytes of UTF-8 JSON:
                    [{"chunk_id", "doc_id", "text"}, ...] in entry order
    vectors         count * dim float32, entry order
    crc32           u32 over every preceding byte
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
import threading
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .embed import EmbeddedChunk
from .errors import ContractViolationError, EmptyIndexError, IndexFormatError, IndexVersionError

MAGIC = b"LENSIDX1"
FORMAT_VERSION = 1

_HEADER = struct.Struct("<8sIIQ")
_U64 = struct.Struct("<Q")
_U32 = struct.Struct("<I")

NORM_TOLERANCE = 1e-3  # reject vectors whose norm is not ~1 before renormalizing


@dataclass(frozen=True)
class Hit:
    chunk_id: str
    doc_id: str
    score: float
    text: str


@dataclass
class RetrievalResult:
    hits: list[Hit]  # scores non-increasing, ties by ascending chunk_id


@dataclass(frozen=True)
class Query:
    text: str
    vector: np.ndarray
    k: int = 5

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        norm = float(np.linalg.norm(self.vector))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise ValueError(f"query vector must be unit-normalized (norm={norm:.6f})")


class _ReadWriteLock:
    """Many concurrent readers or one writer; writers wait for readers."""

    def __init__(self):
        self._readers = 0
        self._readers_lock = threading.Lock()
        self._writer_lock = threading.Lock()

    def acquire_read(self) -> None:
        with self._readers_lock:
            self._readers += 1
            if self._readers == 1:
                self._writer_lock.acquire()

    def release_read(self) -> None:
        with self._readers_lock:
            self._readers -= 1
            if self._readers == 0:
                self._writer_lock.release()

    def acquire_write(self) -> None:
        self._writer_lock.acquire()

    def release_write(self) -> None:
        self._writer_lock.release()


class VectorIndex:
    """Append-only store of (chunk_id, doc_id, vector, text) with upsert.

    Reader-writer discipline: searches and saves run concurrently; an upsert
    batch is applied under the write lock, so a concurrent search never
    observes it half-applied.
    """

    def __init__(self, dim: int):
        if dim < 2:
            raise ValueError(f"dim must be >= 2, got {dim}")
        self._dim = dim
        self._chunk_ids: list[str] = []
        self._doc_ids: list[str] = []
        self._texts: list[str] = []
        self._rows: list[np.ndarray] = []  # float32 unit vectors
        self._id_map: dict[str, int] = {}
        self._lock = _ReadWriteLock()

    @property
    def dim(self) -> int:
        return self._dim

    def __len__(self) -> int:
        return len(self._chunk_ids)

    def chunk_ids(self) -> list[str]:
        return list(self._chunk_ids)

    def vector_for(self, chunk_id: str) -> np.ndarray:
        return self._rows[self._id_map[chunk_id]].copy()

    def upsert(self, items: Iterable[EmbeddedChunk]) -> int:
        """Insert new chunk_ids, replace vector and text for existing ones.

        The whole batch is validated before anything mutates, then applied
        under the write lock: a failing or concurrent batch is never visible
        half-applied.
        """
        prepared: list[tuple[EmbeddedChunk, np.ndarray]] = []
        for item in items:
            vec = np.asarray(item.vector, dtype=np.float64)
            if vec.shape != (self._dim,):
                raise ContractViolationError(
                    f"vector for {item.chunk.chunk_id} has shape {vec.shape}, "
                    f"index dim is {self._dim}"
                )
            norm = float(np.linalg.norm(vec))
            if not np.isfinite(vec).all() or abs(norm - 1.0) > NORM_TOLERANCE:
                raise ContractViolationError(
                    f"vector for {item.chunk.chunk_id} is not unit-normalized "
                    f"(norm={norm:.6f})"
                )
            prepared.append((item, (vec / norm).astype(np.float32)))

        self._lock.acquire_write()
        try:
            for item, row in prepared:
                chunk_id = item.chunk.chunk_id
                pos = self._id_map.get(chunk_id)
                if pos is None:
                    self._id_map[chunk_id] = len(self._chunk_ids)
                    self._chunk_ids.append(chunk_id)
                    self._doc_ids.append(item.chunk.doc_id)
                    self._texts.append(item.chunk.text)
                    self._rows.append(row)
                else:
                    self._doc_ids[pos] = item.chunk.doc_id
                    self._texts[pos] = item.chunk.text
                    self._rows[pos] = row
        finally:
            self._lock.release_write()
        return len(prepared)

    def _matrix(self) -> np.ndarray:
        if not self._rows:
            return np.empty((0, self._dim), dtype=np.float32)
        return np.vstack(self._rows)

    def search(self, query: Query) -> RetrievalResult:
        """Exact top-k by cosine (dot product of unit vectors)."""
        if query.vector.shape != (self._dim,):
            raise ContractViolationError(
                f"query dim {query.vector.shape} does not match index dim {self._dim}"
            )
        self._lock.acquire_read()
        try:
            n = len(self)
            if n == 0:
                raise EmptyIndexError("cannot search an empty index")
            k = min(query.k, n)
            scores = self._matrix().astype(np.float64) @ np.asarray(
                query.vector, dtype=np.float64
            )
            if k < n:
                # Partial selection, then widen to every boundary tie so the
                # final chunk_id tie-break matches a full sort exactly.
                part = np.argpartition(-scores, k - 1)
                threshold = scores[part[k - 1]]
                candidates = np.where(scores >= threshold)[0]
            else:
                candidates = np.arange(n)
            ranked = sorted(
                candidates, key=lambda i: (-scores[i], self._chunk_ids[i])
            )[:k]
            hits = [
                Hit(
                    chunk_id=self._chunk_ids[i],
                    doc_id=self._doc_ids[i],
                    score=float(scores[i]),
                    text=self._texts[i],
                )
                for i in ranked
            ]
        finally:
            self._lock.release_read()
        return RetrievalResult(hits=hits)

    def save(self, path: str | Path) -> None:
        """Write the on-disk format atomically (temp file + rename).

        Runs under the read lock: the snapshot is immutable while serialized.
        """
        self._lock.acquire_read()
        try:
            self._save_locked(Path(path))
        finally:
            self._lock.release_read()

    def _save_locked(self, path: Path) -> None:
        metadata = json.dumps(
            [
                {"chunk_id": c, "doc_id": d, "text": t}
                for c, d, t in zip(self._chunk_ids, self._doc_ids, self._texts)
            ],
            ensure_ascii=False,
        ).encode("utf-8")
        blob = bytearray()
        blob += _HEADER.pack(MAGIC, FORMAT_VERSION, self._dim, len(self._chunk_ids))
        blob += _U64.pack(len(metadata))
        blob += metadata
        blob += self._matrix().astype("<f4").tobytes(order="C")
        blob += _U32.pack(zlib.crc32(bytes(blob)))
        fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(bytes(blob))
            os.replace(tmp_name, path)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise

    @classmethod
    def load(cls, path: str | Path) -> "VectorIndex":
        """Parse and verify a saved index; never returns a partial index."""
        data = Path(path).read_bytes()
        if len(data) < _HEADER.size + _U64.size + _U32.size:
            raise IndexFormatError("file truncated inside header")
        magic, version, dim, count = _HEADER.unpack_from(data, 0)
        if magic != MAGIC:
            raise IndexVersionError(f"bad magic {magic!r}, expected {MAGIC!r}")
        if version != FORMAT_VERSION:
            raise IndexVersionError(
                f"unsupported format version {version}, expected {FORMAT_VERSION}"
            )
        offset = _HEADER.size
        (meta_len,) = _U64.unpack_from(data, offset)
        offset += _U64.size
        if offset + meta_len > len(data):
            raise IndexFormatError("file truncated inside metadata block")
        try:
            metadata = json.loads(data[offset : offset + meta_len].decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise IndexFormatError(f"metadata block is not valid JSON: {exc}")
        offset += meta_len
        if not isinstance(metadata, list) or len(metadata) != count:
            raise IndexFormatError(
                f"metadata lists {len(metadata) if isinstance(metadata, list) else '?'} "
                f"entries, header says {count}"
            )
        vec_bytes = count * dim * 4
        if offset + vec_bytes > len(data):
            raise IndexFormatError("file truncated inside vector block")
        vectors = np.frombuffer(
            data, dtype="<f4", count=count * dim, offset=offset
        ).reshape(count, dim)
        offset += vec_bytes
        if offset + _U32.size > len(data):
            raise IndexFormatError("file truncated before checksum")
        (stored_crc,) = _U32.unpack_from(data, offset)
        if offset + _U32.size != len(data):
            raise IndexFormatError("trailing bytes after checksum")
        if zlib.crc32(data[:offset]) != stored_crc:
            raise IndexFormatError("checksum mismatch: file is corrupt")

        if dim < 2:
            raise IndexFormatError(f"header dim {dim} is invalid")
        index = cls(dim)
        for i, row in enumerate(metadata):
            chunk_id = row["chunk_id"]
            if chunk_id in index._id_map:
                raise IndexFormatError(f"duplicate chunk_id in metadata: {chunk_id}")
            index._id_map[chunk_id] = i
            index._chunk_ids.append(chunk_id)
            index._doc_ids.append(row["doc_id"])
            index._texts.append(row["text"])
            index._rows.append(vectors[i].copy())
        return index
