"""Rank/reward wire types and the append-only event log.

The log is one JSON Lines file per model. Every line is a complete
RankEvent record; an event that settles later is appended again in its
amended form, and readers keep the last line per event id. Retention
purges rewrite the file (which also compacts amendments away).
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterator, Mapping

from bidimatch.errors import StoreUnavailable

# Identifier-like keys are never learning features; requests always
# exclude them regardless of caller input.
ID_FEATURE_NAMES = frozenset(
    {"id", "action_id", "event_id", "job_id", "job_number", "contact_id", "facility_id"}
)


class ModelName(str, Enum):
    TRAVELER = "traveler_model"
    JOB = "job_model"


class RewardSource(str, Enum):
    USER = "User"
    BATCH = "Batch"
    DEFAULT = "Default"


class RewardStatus(str, Enum):
    ACCEPTED = "Accepted"
    DUPLICATE = "Duplicate"


@dataclass(frozen=True)
class ActionCandidate:
    action_id: str
    features: Mapping[str, Any]


@dataclass(frozen=True)
class RankRequest:
    context_features: Mapping[str, Any]
    actions: tuple[ActionCandidate, ...]
    excluded_features: frozenset[str] = frozenset()
    event_id: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "actions", tuple(self.actions))
        object.__setattr__(self, "excluded_features", frozenset(self.excluded_features) | ID_FEATURE_NAMES)


@dataclass(frozen=True)
class RankedAction:
    action_id: str
    probability: float


@dataclass(frozen=True)
class RankResponse:
    event_id: str
    ranking: tuple[RankedAction, ...]
    chosen_action_id: str
    propensity: float

    def probability_of(self, action_id: str) -> float:
        for entry in self.ranking:
            if entry.action_id == action_id:
                return entry.probability
        raise KeyError(action_id)


@dataclass(frozen=True)
class RewardAck:
    event_id: str
    status: RewardStatus


@dataclass
class RankEvent:
    """One logged bandit decision, amended in place as its reward settles."""

    event_id: str
    timestamp: float
    model_name: ModelName
    context: Mapping[str, Any]
    actions: tuple[ActionCandidate, ...]
    excluded_features: frozenset[str]
    chosen_action_id: str
    propensity: float
    probabilities: dict[str, float]
    reward: float | None = None
    reward_source: RewardSource | None = None
    reward_time: float | None = None
    trained: bool = False
    partial_rewards: list[float] = field(default_factory=list)

    def chosen_action(self) -> ActionCandidate:
        for action in self.actions:
            if action.action_id == self.chosen_action_id:
                return action
        raise KeyError(self.chosen_action_id)

    def settled(self) -> bool:
        return self.reward is not None

    def to_record(self) -> dict[str, Any]:
        return {
            "event_id": self.event_id,
            "timestamp": self.timestamp,
            "model_name": self.model_name.value,
            "context": dict(self.context),
            "actions": [{"action_id": a.action_id, "features": dict(a.features)} for a in self.actions],
            "excluded_features": sorted(self.excluded_features),
            "chosen_action_id": self.chosen_action_id,
            "propensity": self.propensity,
            "probabilities": self.probabilities,
            "reward": self.reward,
            "reward_source": self.reward_source.value if self.reward_source else None,
            "reward_time": self.reward_time,
            "trained": self.trained,
            "partial_rewards": list(self.partial_rewards),
        }

    @classmethod
    def from_record(cls, record: Mapping[str, Any]) -> "RankEvent":
        return cls(
            event_id=record["event_id"],
            timestamp=float(record["timestamp"]),
            model_name=ModelName(record["model_name"]),
            context=record.get("context") or {},
            actions=tuple(
                ActionCandidate(a["action_id"], a.get("features") or {}) for a in record.get("actions") or ()
            ),
            excluded_features=frozenset(record.get("excluded_features") or ()),
            chosen_action_id=record["chosen_action_id"],
            propensity=float(record["propensity"]),
            probabilities={k: float(v) for k, v in (record.get("probabilities") or {}).items()},
            reward=None if record.get("reward") is None else float(record["reward"]),
            reward_source=RewardSource(record["reward_source"]) if record.get("reward_source") else None,
            reward_time=None if record.get("reward_time") is None else float(record["reward_time"]),
            trained=bool(record.get("trained", False)),
            partial_rewards=[float(v) for v in record.get("partial_rewards") or ()],
        )


class EventLog:
    """Insertion-ordered event map with optional JSONL persistence."""

    def __init__(self, path: str | Path | None = None):
        self._events: dict[str, RankEvent] = {}
        self._path = Path(path) if path is not None else None
        self._io_lock = threading.Lock()
        if self._path is not None and self._path.exists():
            self._load()

    def _load(self) -> None:
        try:
            with self._path.open("r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    event = RankEvent.from_record(json.loads(line))
                    self._events[event.event_id] = event  # last line per id wins
        except OSError as exc:
            raise StoreUnavailable(f"cannot open event log {self._path}: {exc}") from exc
        # amended lines land late in the file; restore chronological order
        self._events = dict(sorted(self._events.items(), key=lambda kv: kv[1].timestamp))

    def _write_line(self, event: RankEvent) -> None:
        if self._path is None:
            return
        with self._io_lock:
            self._path.parent.mkdir(parents=True, exist_ok=True)
            with self._path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(event.to_record()) + "\n")

    def append(self, event: RankEvent) -> None:
        self._events[event.event_id] = event
        self._write_line(event)

    def amend(self, event: RankEvent) -> None:
        """Persist the updated state of an already-appended event."""
        self._write_line(event)

    def get(self, event_id: str) -> RankEvent | None:
        return self._events.get(event_id)

    def remove_many(self, event_ids: list[str]) -> None:
        for event_id in event_ids:
            self._events.pop(event_id, None)
        self._rewrite()

    def _rewrite(self) -> None:
        if self._path is None:
            return
        with self._io_lock:
            tmp = self._path.with_suffix(self._path.suffix + ".tmp")
            with tmp.open("w", encoding="utf-8") as fh:
                for event in self._events.values():
                    fh.write(json.dumps(event.to_record()) + "\n")
            tmp.replace(self._path)

    def __iter__(self) -> Iterator[RankEvent]:
        return iter(list(self._events.values()))

    def __len__(self) -> int:
        return len(self._events)

    @property
    def path(self) -> Path | None:
        return self._path
