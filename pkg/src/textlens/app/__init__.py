"""End-to-end wiring: configuration, stage manifest, CLI, and HTTP service."""

from .config import PipelineConfig, load_config
from .manifest import Manifest, WorkDirLock
from .stages import run_pipeline, run_query

__all__ = [
    "Manifest",
    "PipelineConfig",
    "WorkDirLock",
    "load_config",
    "run_pipeline",
    "run_query",
]
