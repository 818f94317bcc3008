"""Layered runtime configuration: file < environment < CLI flags.

The config file is flat `key = value` text with `#` comments. API keys
are environment-only (SEARCH_API_KEY): a key in a file ends up in
version control sooner or later, so the parser rejects it outright.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Mapping

from pydantic import BaseModel, Field, ValidationError, field_validator

from .errors import ConfigError

ENV_KEYS = {
    "TEPROLIN_ENDPOINT": "teprolin_endpoint",
    "SEARCH_ENDPOINT": "search_endpoint",
    "SEARCH_API_KEY": "search_api_key",
    "INFER_ENDPOINT": "infer_endpoint",
}

_ENV_ONLY_FILE_KEYS = {"search_api_key"}
_LIST_KEYS = {"models", "cors_origins"}


class Settings(BaseModel):
    """Everything the service and CLI need to build an engine."""

    teprolin_endpoint: str | None = None
    search_endpoint: str = "https://api.bing.microsoft.com/v7.0/search"
    search_api_key: str = Field(default="", repr=False)
    infer_endpoint: str | None = None
    models: tuple[str, ...] = ("covid-ro-v1",)
    market: str = "ro-RO"
    count: int = 10
    timeout_ms: int = 5000
    max_span_tokens: int = 30
    no_answer_threshold: float = 0.0
    max_context_chars: int = 2000
    top_k: int = 10
    min_results: int = 1
    max_parallel_extract: int = 4
    max_in_flight_search: int = 2
    cors_origins: tuple[str, ...] = ("*",)
    #: when set, search and inference run from recorded fixtures (no network)
    offline_dir: str | None = None
    #: word-list files overriding the packaged Romanian resources
    function_words_file: str | None = None
    excluded_verbs_file: str | None = None

    @field_validator("models")
    @classmethod
    def _at_least_one_model(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        if not v:
            raise ValueError("at least one model identifier is required")
        return v


def parse_config_file(path: str | Path) -> dict[str, Any]:
    """Read a flat key=value config file into a raw settings dict."""
    raw: dict[str, Any] = {}
    known = set(Settings.model_fields)
    for line_no, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key in _ENV_ONLY_FILE_KEYS:
            raise ConfigError(
                f"{path}:{line_no}: {key} must come from the environment, not a file"
            )
        if key not in known:
            raise ConfigError(f"{path}:{line_no}: unknown setting {key!r}")
        raw[key] = _split_list(value) if key in _LIST_KEYS else value
    return raw


def _split_list(value: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in value.split(",") if part.strip())


def load_settings(
    config_file: str | Path | None = None,
    env: Mapping[str, str] | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> Settings:
    """Build Settings from file, environment and explicit overrides, in
    increasing precedence. None-valued overrides are ignored."""
    env = os.environ if env is None else env
    raw: dict[str, Any] = {}
    if config_file is not None:
        if not Path(config_file).is_file():
            raise ConfigError(f"config file not found: {config_file}")
        raw.update(parse_config_file(config_file))
    for env_key, field in ENV_KEYS.items():
        if env.get(env_key):
            raw[field] = env[env_key]
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = value
    try:
        return Settings.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc
