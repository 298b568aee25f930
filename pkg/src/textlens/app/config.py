"""Pipeline configuration: one JSON document per run.

Everything that affects output lives in the config file so a run is
reproducible from a single artifact; the only values read from the
environment are remote-provider secrets and endpoints (EMBED_ENDPOINT,
EMBED_MODEL, EMBED_API_KEY, GEN_ENDPOINT, GEN_MODEL, GEN_API_KEY), which
must never be committed alongside the config.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..cluster.density import HdbscanConfig
from ..cluster.pca import ReducerConfig
from ..embed import REMOTE_KIND, ProviderConfig
from ..errors import ConfigError
from ..ingest import ChunkingConfig
from ..label import REMOTE_CHAT_KIND, GenProviderConfig, PromptTemplate


@dataclass
class PipelineConfig:
    corpus_dir: Path
    work_dir: Path
    chunking: ChunkingConfig = field(default_factory=ChunkingConfig)
    embed_stage: ProviderConfig = field(default_factory=ProviderConfig)
    retrieval_stage: ProviderConfig = field(default_factory=ProviderConfig)
    reducer: ReducerConfig = field(default_factory=ReducerConfig)
    hdbscan: HdbscanConfig = field(default_factory=HdbscanConfig)
    labeler: GenProviderConfig = field(default_factory=GenProviderConfig)
    prompt: PromptTemplate = field(default_factory=PromptTemplate)
    top_n: int = 10
    n_repr: int = 3
    coverage_m: int = 10
    default_k: int = 5
    static_dir: Path | None = None

    def __post_init__(self) -> None:
        for name in ("top_n", "n_repr", "coverage_m", "default_k"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")


def _provider_from(data: dict, env_prefix: str) -> ProviderConfig:
    kwargs = dict(data)
    kind = kwargs.get("kind", "local-deterministic")
    if kind == REMOTE_KIND:
        kwargs.setdefault("endpoint_url", os.environ.get(f"{env_prefix}_ENDPOINT", ""))
        kwargs.setdefault("model_name", os.environ.get(f"{env_prefix}_MODEL", ""))
        kwargs["api_key"] = os.environ.get(f"{env_prefix}_API_KEY", "")
    try:
        return ProviderConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad embedding provider config: {exc}")


def _labeler_from(data: dict) -> GenProviderConfig:
    kwargs = dict(data)
    kind = kwargs.get("kind", "stub")
    if kind == REMOTE_CHAT_KIND:
        kwargs.setdefault("endpoint_url", os.environ.get("GEN_ENDPOINT", ""))
        kwargs.setdefault("model_name", os.environ.get("GEN_MODEL", ""))
        kwargs["api_key"] = os.environ.get("GEN_API_KEY", "")
    try:
        return GenProviderConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad generation provider config: {exc}")


def _build(data: dict, base: Path) -> PipelineConfig:
    try:
        corpus_dir = base / data["corpus_dir"]
        work_dir = base / data["work_dir"]
    except KeyError as exc:
        raise ConfigError(f"config is missing required key {exc}")
    try:
        cfg = PipelineConfig(
            corpus_dir=corpus_dir.resolve(),
            work_dir=work_dir.resolve(),
            chunking=ChunkingConfig(**data.get("chunking", {})),
            embed_stage=_provider_from(data.get("embed_stage", {}), "EMBED"),
            retrieval_stage=_provider_from(data.get("retrieval_stage", {}), "EMBED"),
            reducer=ReducerConfig(**data.get("reducer", {})),
            hdbscan=HdbscanConfig(**data.get("hdbscan", {})),
            labeler=_labeler_from(data.get("labeler", {})),
            prompt=PromptTemplate(**data.get("prompt", {})),
            top_n=data.get("top_n", 10),
            n_repr=data.get("n_repr", 3),
            coverage_m=data.get("coverage_m", 10),
            default_k=data.get("default_k", 5),
            static_dir=(base / data["static_dir"]).resolve()
            if data.get("static_dir")
            else None,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}")
    return cfg


def load_config(path: str | Path) -> PipelineConfig:
    """Parse a JSON config file; relative paths resolve against its directory."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    return _build(data, path.parent.resolve())


def config_fingerprint(cfg: PipelineConfig, *sections: str) -> dict:
    """Stable dict of the named config sections, for stage input digests.

    Secrets (api_key) are excluded so rotating a key never invalidates work.
    """
    out: dict = {}
    for section in sections:
        value = getattr(cfg, section)
        if hasattr(value, "__dataclass_fields__"):
            row = {
                name: getattr(value, name)
                for name in value.__dataclass_fields__
                if name != "api_key"
            }
            out[section] = {
                k: str(v) if isinstance(v, Path) else v for k, v in row.items()
            }
        else:
            out[section] = value
    return out
