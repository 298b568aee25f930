"""Exception types shared across the pipeline."""

from __future__ import annotations


class LensError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(LensError):
    """Invalid configuration value or combination."""


class TransportError(LensError):
    """A remote provider call failed after exhausting retries."""

    def __init__(self, message: str, *, status: int | None = None, attempts: int = 0):
        super().__init__(message)
        self.status = status
        self.attempts = attempts


class ContractViolationError(LensError):
    """A provider response broke its declared contract (e.g. wrong dimension)."""


class GenerationError(LensError):
    """A text-generation provider returned an unusable completion."""


class EmptyModelError(LensError):
    """No non-noise clusters were available to fit a keyword model."""


class MissingChunkError(LensError):
    """A referenced chunk_id was not found in the chunk lookup."""


class EmptyIndexError(LensError):
    """Search was attempted against an index with no entries."""


class IndexFormatError(LensError):
    """An index file is corrupt or truncated; the message names the section."""


class IndexVersionError(LensError):
    """An index file has an unknown magic string or format version."""


class PrerequisiteError(LensError):
    """A pipeline stage was run before the stage it depends on."""
