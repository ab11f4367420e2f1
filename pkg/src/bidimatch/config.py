"""Engine and match-scoring configuration.

Config files are flat ``key = value`` documents (``#`` comments allowed).
Unset keys fall back to the defaults below; every key can also be
overridden through environment variables prefixed ``BIDI_`` (for example
``BIDI_EXPLORATION_EPSILON=0.1``).
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from pathlib import Path
from typing import Mapping

from bidimatch.errors import InvalidValue, MissingFile

ENV_PREFIX = "BIDI_"

# Update cadence before/after the cold-start phase (events trained).
COLD_START_UPDATE_SECONDS = 10.0
COLD_START_EVENT_COUNT = 5000


class RewardAggregation(str, Enum):
    EARLIEST = "Earliest"
    SUM = "Sum"


@dataclass(frozen=True)
class EngineConfig:
    """Learning-loop settings for one personalization model."""

    exploration_epsilon: float = 0.2
    reward_wait_seconds: float = 600.0
    default_reward: float = 0.0
    reward_aggregation: RewardAggregation = RewardAggregation.EARLIEST
    model_update_seconds: float = 600.0
    retention_days: int = 200
    max_actions_per_rank: int = 50
    page_size: int = 20
    hash_dimension: int = 1 << 18
    learning_rate: float = 0.05
    apprentice_mode: bool = False

    def __post_init__(self) -> None:
        if not 0.0 <= self.exploration_epsilon <= 1.0:
            raise InvalidValue("exploration_epsilon", "must lie in [0, 1]")
        if self.reward_wait_seconds <= 0:
            raise InvalidValue("reward_wait_seconds", "duration must be positive")
        if not 0.0 <= self.default_reward <= 1.0:
            raise InvalidValue("default_reward", "must lie in [0, 1]")
        if self.model_update_seconds <= 0:
            raise InvalidValue("model_update_seconds", "duration must be positive")
        if self.retention_days <= 0:
            raise InvalidValue("retention_days", "must be a positive integer")
        if self.max_actions_per_rank <= 0:
            raise InvalidValue("max_actions_per_rank", "must be positive")
        if self.page_size <= 0:
            raise InvalidValue("page_size", "must be positive")
        if self.page_size > self.max_actions_per_rank:
            raise InvalidValue("page_size", "must not exceed max_actions_per_rank")
        if self.hash_dimension <= 0 or self.hash_dimension & (self.hash_dimension - 1):
            raise InvalidValue("hash_dimension", "must be a power of two")
        if self.learning_rate <= 0:
            raise InvalidValue("learning_rate", "must be positive")

    def update_interval(self, events_trained: int) -> float:
        """Model update cadence: tight during cold start, relaxed after."""
        if events_trained < COLD_START_EVENT_COUNT:
            return min(COLD_START_UPDATE_SECONDS, self.model_update_seconds)
        return self.model_update_seconds


@dataclass(frozen=True)
class MatchConfig:
    """Tunable pieces of the smart-match rule table."""

    start_horizon_days: int = 90
    bed_size_tolerance: float = 0.25
    client_level_table: Mapping[str, float] = field(default_factory=dict)
    previous_positive: float = 1.0
    previous_none: float = 0.8
    previous_negative: float = 0.0

    def __post_init__(self) -> None:
        if self.start_horizon_days <= 0:
            raise InvalidValue("start_horizon_days", "must be positive")
        if not 0.0 < self.bed_size_tolerance:
            raise InvalidValue("bed_size_tolerance", "must be positive")
        for level, score in self.client_level_table.items():
            if not 0.0 <= score <= 1.0:
                raise InvalidValue(f"client_level.{level}", "score must lie in [0, 1]")


_ENGINE_KEYS = {f.name for f in fields(EngineConfig)}
_MATCH_KEYS = {"start_horizon_days", "bed_size_tolerance", "previous_positive", "previous_none", "previous_negative"}


def _read_flat_file(path: str | Path) -> dict[str, str]:
    p = Path(path)
    if not p.is_file():
        raise MissingFile(str(p))
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keep key case (client_level names)
    try:
        parser.read_string("[cfg]\n" + p.read_text(encoding="utf-8"))
    except configparser.Error as exc:
        raise InvalidValue(str(p), f"unparseable config: {exc}") from exc
    return dict(parser["cfg"])


def _parse_typed(key: str, raw: str):
    if key == "reward_aggregation":
        try:
            return RewardAggregation(raw.strip())
        except ValueError as exc:
            raise InvalidValue(key, f"expected Earliest or Sum, got {raw!r}") from exc
    if key == "apprentice_mode":
        lowered = raw.strip().lower()
        if lowered in ("true", "1", "yes", "on"):
            return True
        if lowered in ("false", "0", "no", "off"):
            return False
        raise InvalidValue(key, f"expected a boolean, got {raw!r}")
    if key in ("retention_days", "max_actions_per_rank", "page_size", "hash_dimension", "start_horizon_days"):
        try:
            return int(raw)
        except ValueError as exc:
            raise InvalidValue(key, f"expected an integer, got {raw!r}") from exc
    try:
        return float(raw)
    except ValueError as exc:
        raise InvalidValue(key, f"expected a number, got {raw!r}") from exc


def _env_overrides() -> dict[str, str]:
    out = {}
    for key, value in os.environ.items():
        if key.startswith(ENV_PREFIX):
            out[key[len(ENV_PREFIX):].lower()] = value
    return out


def load_config(path: str | Path, *, apply_env: bool = True) -> EngineConfig:
    """Load an :class:`EngineConfig`, validating keys and invariants.

    Unknown keys that belong to neither the engine nor the match schema
    raise :class:`InvalidValue` naming the key. Environment overrides
    (``BIDI_*``) are applied on top of the file unless disabled.
    """
    raw = _read_flat_file(path)
    if apply_env:
        raw.update({k: v for k, v in _env_overrides().items() if k in _ENGINE_KEYS})
    values = {}
    for key, text in raw.items():
        if key in _ENGINE_KEYS:
            values[key] = _parse_typed(key, text)
        elif key in _MATCH_KEYS or key.startswith("client_level."):
            continue  # owned by load_match_config
        else:
            raise InvalidValue(key, "unknown configuration key")
    return EngineConfig(**values)


def engine_config_from_env() -> EngineConfig:
    """Defaults plus any ``BIDI_*`` environment overrides (no file)."""
    values = {}
    for key, text in _env_overrides().items():
        if key in _ENGINE_KEYS:
            values[key] = _parse_typed(key, text)
    return EngineConfig(**values)


def load_match_config(path: str | Path) -> MatchConfig:
    """Load the smart-match rule knobs from the same flat file format."""
    raw = _read_flat_file(path)
    values: dict[str, object] = {}
    table: dict[str, float] = {}
    for key, text in raw.items():
        if key in _MATCH_KEYS:
            values[key] = _parse_typed(key, text)
        elif key.startswith("client_level."):
            level = key[len("client_level."):]
            score = _parse_typed(key, text)
            table[level] = float(score)
        elif key in _ENGINE_KEYS:
            continue
        else:
            raise InvalidValue(key, "unknown configuration key")
    if table:
        values["client_level_table"] = table
    return MatchConfig(**values)


def with_overrides(config: EngineConfig, **changes) -> EngineConfig:
    """Return a copy of ``config`` with the given fields replaced."""
    return replace(config, **changes)
