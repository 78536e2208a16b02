"""Application configuration.

Values merge with precedence: CLI flag > environment variable > config file
> built-in default. Environment variables are the field name upper-cased with
a LITMINE_ prefix (e.g. LITMINE_BM25_THRESHOLD).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping

import yaml

from ..answers import ANSWER_LIMIT, DEFAULT_ALPHA
from ..corpus import DEFAULT_OVERLAP, DEFAULT_WINDOW
from ..dense import DEFAULT_DIMENSION
from ..dialogue import DEFAULT_SESSION_TTL
from ..errors import InvalidInputError
from ..fusion import DEFAULT_BM25_THRESHOLD, DEFAULT_COSINE_THRESHOLD, DEFAULT_TOP_K

ENV_PREFIX = "LITMINE_"


@dataclass
class AppConfig:
    artifacts_dir: str = "artifacts"
    bm25_threshold: float = DEFAULT_BM25_THRESHOLD
    cosine_threshold: float = DEFAULT_COSINE_THRESHOLD
    top_k: int = DEFAULT_TOP_K
    strategy: str = "union"
    alpha: float = DEFAULT_ALPHA
    answer_cap: int = ANSWER_LIMIT
    window: int = DEFAULT_WINDOW
    overlap: int = DEFAULT_OVERLAP
    embedding_dimension: int = DEFAULT_DIMENSION
    bm25_k1: float = 1.5
    bm25_b: float = 0.75
    embedder_endpoint: str | None = None
    extractor_endpoint: str | None = None
    classifier_endpoint: str | None = None
    generator_endpoint: str | None = None
    dictionary_path: str | None = None
    static_dir: str | None = None
    session_ttl: float = DEFAULT_SESSION_TTL
    host: str = "127.0.0.1"
    port: int = 8080
    debug: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.bm25_threshold) and math.isfinite(self.cosine_threshold)):
            raise InvalidInputError("thresholds must be finite")
        if not 0.0 <= self.alpha <= 1.0:
            raise InvalidInputError("alpha must be in [0, 1]")

    @classmethod
    def load(
        cls,
        config_file: str | Path | None = None,
        env: Mapping[str, str] | None = None,
        overrides: Mapping[str, Any] | None = None,
    ) -> "AppConfig":
        env = os.environ if env is None else env
        values: dict[str, Any] = {}
        if config_file is not None:
            loaded = yaml.safe_load(Path(config_file).read_text(encoding="utf-8")) or {}
            if not isinstance(loaded, dict):
                raise InvalidInputError(f"config file {config_file} must hold a mapping")
            values.update(loaded)
        field_types = {f.name: f.type for f in fields(cls)}
        for name in field_types:
            env_key = ENV_PREFIX + name.upper()
            if env_key in env:
                values[name] = env[env_key]
        if overrides:
            values.update({k: v for k, v in overrides.items() if v is not None})
        unknown = set(values) - set(field_types)
        if unknown:
            raise InvalidInputError(f"unknown config keys: {sorted(unknown)}")
        return cls(**{k: _coerce(field_types[k], v) for k, v in values.items()})


def _coerce(field_type: str, value: Any) -> Any:
    if value is None or not isinstance(value, str):
        return value
    if "bool" in field_type:
        return value.lower() in ("1", "true", "yes", "on")
    if "int" in field_type:
        return int(value)
    if "float" in field_type:
        return float(value)
    return value
