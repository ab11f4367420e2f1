"""Epsilon-greedy serving loop: rank, reward, expiry, training, retention.

Concurrency: rank() and reward() may be called from many threads. All
model reads and weight updates are serialized through one re-entrant
lock per instance, so a prediction never observes a half-applied SGD
step. The event log is append-only with the trainer as sole consumer.
"""

from __future__ import annotations

import logging
import random
import threading
from pathlib import Path

from bidimatch.bandit.events import (
    ID_FEATURE_NAMES,
    ActionCandidate,
    EventLog,
    ModelName,
    RankEvent,
    RankRequest,
    RankResponse,
    RankedAction,
    RewardAck,
    RewardSource,
    RewardStatus,
)
from bidimatch.bandit.features import FeatureHasher
from bidimatch.bandit.model import PolicyModel, load_snapshot, predict, save_snapshot, sgd_step
from bidimatch.config import EngineConfig, RewardAggregation
from bidimatch.errors import (
    DuplicateActionIds,
    EmptyActions,
    LabelOutOfRange,
    OutOfRange,
    TooManyActions,
    UnknownEvent,
    WindowExpired,
)
from bidimatch.ids import new_event_id

logger = logging.getLogger(__name__)


class ContextualBandit:
    """One personalization model instance (traveler-side or job-side)."""

    def __init__(
        self,
        name: ModelName,
        config: EngineConfig,
        *,
        log_path: str | Path | None = None,
        rng: random.Random | int | None = None,
        snapshot_path: str | Path | None = None,
        snapshot_every: int = 0,
    ):
        self.name = name
        self.config = config
        self.model = PolicyModel.zeros(config.hash_dimension, config.exploration_epsilon, config.learning_rate)
        self.hasher = FeatureHasher(config.hash_dimension)
        self.events = EventLog(log_path)
        self._rng = rng if isinstance(rng, random.Random) else random.Random(rng)
        self._lock = threading.RLock()
        self._snapshot_path = Path(snapshot_path) if snapshot_path else None
        self._snapshot_every = snapshot_every
        self._last_snapshot_updates = 0
        # settled-but-untrained and unsettled queues, in event-time order
        self._untrained: dict[str, None] = {}
        self._unsettled: dict[str, None] = {}
        for event in self.events:
            if not event.settled():
                self._unsettled[event.event_id] = None
            elif not event.trained:
                self._untrained[event.event_id] = None

    # -- serving -------------------------------------------------------

    def rank(self, request: RankRequest, now: float, rng: random.Random | int | None = None) -> RankResponse:
        """Score the request's actions, pick one, and log the event.

        Greedy choice is the argmax reward estimate (ties to the lowest
        action id); with probability epsilon the choice is uniform over
        all actions instead. The logged propensity is the probability of
        the action actually chosen: ``1 - eps + eps/K`` for the greedy
        action, ``eps/K`` otherwise. In apprentice mode the returned
        ranking mirrors the request's incoming order (the baseline) while
        rewards still train the model in shadow.
        """
        actions = request.actions
        count = len(actions)
        if count == 0:
            raise EmptyActions("rank request carries no actions")
        if count > self.config.max_actions_per_rank:
            raise TooManyActions(f"{count} actions exceed the limit of {self.config.max_actions_per_rank}")
        ids = [a.action_id for a in actions]
        if len(set(ids)) != count:
            raise DuplicateActionIds("rank request action ids must be unique")

        chooser = rng if isinstance(rng, random.Random) else (random.Random(rng) if rng is not None else self._rng)
        with self._lock:
            scores = [
                predict(self.model, self.hasher.indices(request.context_features, a.features, request.excluded_features))
                for a in actions
            ]
            greedy_index = min(range(count), key=lambda i: (-scores[i], ids[i]))
            epsilon = self.model.epsilon
            if self.config.apprentice_mode:
                chosen_index = 0
                propensity = 1.0
                ranking = tuple(RankedAction(ids[i], scores[i]) for i in range(count))
            else:
                if epsilon > 0.0 and chooser.random() < epsilon:
                    chosen_index = chooser.randrange(count)
                else:
                    chosen_index = greedy_index
                propensity = (1.0 - epsilon + epsilon / count) if chosen_index == greedy_index else epsilon / count
                order = sorted(range(count), key=lambda i: (-scores[i], ids[i]))
                ranking = tuple(RankedAction(ids[i], scores[i]) for i in order)

            event_id = request.event_id or new_event_id()
            event = RankEvent(
                event_id=event_id,
                timestamp=now,
                model_name=self.name,
                context=request.context_features,
                actions=actions,
                excluded_features=request.excluded_features,
                chosen_action_id=ids[chosen_index],
                propensity=propensity,
                probabilities=dict(zip(ids, scores)),
            )
            self.events.append(event)
            self._unsettled[event_id] = None
        return RankResponse(event_id, ranking, ids[chosen_index], propensity)

    # -- feedback ------------------------------------------------------

    def reward(self, event_id: str, value: float, now: float, source: RewardSource = RewardSource.USER) -> RewardAck:
        """Deliver feedback for a ranked event within the wait window.

        Earliest aggregation: the first reward sticks, later calls are
        acknowledged as duplicates. Sum aggregation: values accumulate
        and settle (clamped to [0, 1]) when the window closes.
        """
        if not 0.0 <= value <= 1.0:
            raise OutOfRange(f"reward {value} outside [0, 1]")
        with self._lock:
            event = self.events.get(event_id)
            if event is None:
                raise UnknownEvent(event_id)
            if now - event.timestamp > self.config.reward_wait_seconds:
                raise WindowExpired(f"event {event_id} is past the reward wait window")
            if self.config.reward_aggregation is RewardAggregation.EARLIEST:
                if event.settled():
                    return RewardAck(event_id, RewardStatus.DUPLICATE)
                self._settle(event, value, source, now)
                return RewardAck(event_id, RewardStatus.ACCEPTED)
            # Sum: keep accumulating until the window closes
            event.partial_rewards.append(value)
            if event.reward_source is None:
                event.reward_source = source
            self.events.amend(event)
            return RewardAck(event_id, RewardStatus.ACCEPTED)

    def _settle(self, event: RankEvent, value: float, source: RewardSource, now: float) -> None:
        event.reward = value
        event.reward_source = source
        event.reward_time = now
        self._unsettled.pop(event.event_id, None)
        if not event.trained:
            self._untrained[event.event_id] = None
        self.events.amend(event)

    def expire_events(self, now: float) -> int:
        """Close reward windows: default unrewarded events, settle sums."""
        defaulted = 0
        wait = self.config.reward_wait_seconds
        with self._lock:
            expired = [eid for eid in self._unsettled if now - self.events.get(eid).timestamp > wait]
            for event_id in expired:
                event = self.events.get(event_id)
                if event is None or event.settled():
                    self._unsettled.pop(event_id, None)
                    continue
                if event.partial_rewards:
                    total = min(1.0, max(0.0, sum(event.partial_rewards)))
                    self._settle(event, total, event.reward_source or RewardSource.USER, now)
                else:
                    self._settle(event, self.config.default_reward, RewardSource.DEFAULT, now)
                    defaulted += 1
        return defaulted

    # -- learning ------------------------------------------------------

    def train_pending(self, now: float | None = None) -> int:
        """One SGD step per settled, not-yet-trained event (chosen action)."""
        updates = 0
        with self._lock:
            pending = list(self._untrained)
            for event_id in pending:
                event = self.events.get(event_id)
                self._untrained.pop(event_id, None)
                if event is None or event.trained or not event.settled():
                    continue
                indices = self.hasher.indices(event.context, event.chosen_action().features, event.excluded_features)
                sgd_step(self.model, indices, event.reward)
                event.trained = True
                self.events.amend(event)
                updates += 1
            if updates:
                self._maybe_snapshot()
        return updates

    def apprentice_train(
        self,
        context: dict,
        actions: tuple[ActionCandidate, ...] | list[ActionCandidate],
        labels: dict[str, float],
        exclusions: frozenset[str] = frozenset(),
    ) -> int:
        """Full-supervision training: one step per labeled action.

        Labels are smart-match totals, so every action trains (not just a
        chosen one). Used to warm the model up and by batch training.
        """
        for action_id, label in labels.items():
            if not 0.0 <= label <= 1.0:
                raise LabelOutOfRange(f"label for {action_id} outside [0, 1]: {label}")
        updates = 0
        with self._lock:
            for action in actions:
                label = labels.get(action.action_id)
                if label is None:
                    continue
                indices = self.hasher.indices(context, action.features, exclusions | ID_FEATURE_NAMES)
                sgd_step(self.model, indices, label)
                updates += 1
            if updates:
                self._maybe_snapshot()
        return updates

    def update_interval(self) -> float:
        return self.config.update_interval(self.model.updates_applied)

    # -- retention and persistence --------------------------------------

    def purge_retention(self, now: float) -> int:
        """Drop events older than the retention window from the log."""
        cutoff = now - self.config.retention_days * 86400.0
        with self._lock:
            stale = [e.event_id for e in self.events if e.timestamp < cutoff]
            for event_id in stale:
                self._unsettled.pop(event_id, None)
                self._untrained.pop(event_id, None)
            if stale:
                self.events.remove_many(stale)
        return len(stale)

    def snapshot(self, path: str | Path | None = None) -> Path:
        target = Path(path) if path is not None else self._snapshot_path
        if target is None:
            raise ValueError("no snapshot path configured")
        with self._lock:
            save_snapshot(self.model, target)
            self._last_snapshot_updates = self.model.updates_applied
        return target

    def restore(self, path: str | Path) -> None:
        with self._lock:
            self.model = load_snapshot(path)

    def _maybe_snapshot(self) -> None:
        if self._snapshot_path is None or self._snapshot_every <= 0:
            return
        if self.model.updates_applied - self._last_snapshot_updates >= self._snapshot_every:
            save_snapshot(self.model, self._snapshot_path)
            self._last_snapshot_updates = self.model.updates_applied
            logger.debug("snapshot v%d written for %s", self.model.version, self.name.value)
