"""Stage manifest: which artifacts exist, from which inputs, plus work-dir
locking and atomic writes.

A stage is complete only when its manifest entry, its artifact files, and the
recorded digests all agree; recording a stage drops every downstream entry so
stale artifacts can never masquerade as current.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path

from ..errors import LensError, PrerequisiteError

MANIFEST_NAME = "manifest.json"
LOCK_NAME = ".lens.lock"
MANIFEST_VERSION = 1

STAGE_ORDER = ["ingest", "embed", "topics", "label", "eval"]

# Artifact filenames per stage, in the work directory.
ARTIFACTS: dict[str, list[str]] = {
    "ingest": ["chunks.jsonl"],
    "embed": ["embeddings.npy", "index.lens"],
    "topics": ["topics.json"],
    "label": ["labels.json"],
    "eval": ["report.json", "report.txt"],
}


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def digest_of(obj) -> str:
    """Digest of any JSON-serializable object, key order insensitive."""
    return sha256_bytes(json.dumps(obj, sort_keys=True).encode("utf-8"))


def corpus_digest(corpus_dir: Path) -> str:
    """Digest of the corpus directory: filenames plus file contents."""
    entries = []
    for path in sorted(corpus_dir.glob("*.json"), key=lambda p: p.name):
        entries.append([path.name, sha256_file(path)])
    return digest_of(entries)


def atomic_write_bytes(path: Path, data: bytes) -> None:
    """Write via a temp file in the same directory, then rename."""
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def atomic_write_text(path: Path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


class WorkDirLock:
    """One pipeline run per work_dir, enforced with an O_EXCL lock file."""

    def __init__(self, work_dir: Path):
        self.path = Path(work_dir) / LOCK_NAME

    def __enter__(self) -> "WorkDirLock":
        self.path.parent.mkdir(parents=True, exist_ok=True)
        try:
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            holder = ""
            try:
                holder = self.path.read_text().strip()
            except OSError:
                pass
            raise LensError(
                f"work dir is locked by another run (pid {holder or 'unknown'}); "
                f"remove {self.path} if that process is gone"
            )
        with os.fdopen(fd, "w") as fh:
            fh.write(str(os.getpid()))
        return self

    def __exit__(self, *exc_info) -> None:
        try:
            self.path.unlink()
        except FileNotFoundError:
            pass


class Manifest:
    def __init__(self, work_dir: Path, data: dict | None = None):
        self.work_dir = Path(work_dir)
        self.data = data or {"version": MANIFEST_VERSION, "stages": {}}

    @classmethod
    def load(cls, work_dir: Path) -> "Manifest":
        path = Path(work_dir) / MANIFEST_NAME
        if not path.exists():
            return cls(work_dir)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            # A half-written manifest means the artifacts cannot be trusted.
            return cls(work_dir)
        if data.get("version") != MANIFEST_VERSION:
            return cls(work_dir)
        return cls(work_dir, data)

    def save(self) -> None:
        self.work_dir.mkdir(parents=True, exist_ok=True)
        atomic_write_text(
            self.work_dir / MANIFEST_NAME,
            json.dumps(self.data, indent=2, sort_keys=True) + "\n",
        )

    def artifact_path(self, name: str) -> Path:
        return self.work_dir / name

    def stage_entry(self, stage: str) -> dict | None:
        return self.data["stages"].get(stage)

    def _artifacts_valid(self, entry: dict) -> bool:
        for name, digest in entry.get("artifacts", {}).items():
            path = self.artifact_path(name)
            if not path.exists() or sha256_file(path) != digest:
                return False
        return True

    def is_complete(self, stage: str, input_digest: str) -> bool:
        entry = self.stage_entry(stage)
        return (
            entry is not None
            and entry.get("input_digest") == input_digest
            and self._artifacts_valid(entry)
        )

    def require(self, stage: str) -> dict:
        """Entry for a prerequisite stage, or an actionable error."""
        entry = self.stage_entry(stage)
        if entry is None or not self._artifacts_valid(entry):
            raise PrerequisiteError(
                f"stage '{stage}' has not produced valid artifacts yet; "
                f"run `lens {stage}` first"
            )
        return entry

    def record_stage(self, stage: str, input_digest: str, summary: dict) -> None:
        """Mark a stage complete and invalidate everything downstream."""
        artifacts = {}
        for name in ARTIFACTS[stage]:
            path = self.artifact_path(name)
            if not path.exists():
                raise LensError(f"stage '{stage}' did not write artifact {name}")
            artifacts[name] = sha256_file(path)
        position = STAGE_ORDER.index(stage)
        for downstream in STAGE_ORDER[position + 1 :]:
            self.data["stages"].pop(downstream, None)
        self.data["stages"][stage] = {
            "artifacts": artifacts,
            "input_digest": input_digest,
            "completed_at": datetime.now(timezone.utc).isoformat(),
            "summary": summary,
        }
        self.save()

    def artifact_digest(self, stage: str, name: str) -> str:
        entry = self.require(stage)
        try:
            return entry["artifacts"][name]
        except KeyError:
            raise PrerequisiteError(
                f"stage '{stage}' has no recorded artifact {name}; run `lens {stage}`"
            )
