"""Counterfactual evaluation of ranking policies from logged events.

Estimator: clipped inverse propensity scoring. For a target policy
``pi`` and logged events with settled rewards ``r_i``, chosen actions and
logging propensities ``p_i``:

    estimate = (1/n) * sum_i r_i * min(pi(chosen_i | x_i) / p_i, clip)

Deterministic policies contribute indicator-weighted terms; stochastic
policies (uniform random, epsilon-greedy) contribute their actual choice
probability. Confidence intervals are normal approximations over the
weighted terms (estimate +/- 1.96 standard errors).

Policy kinds compared in reports:

* ``Online`` - the live model's epsilon-greedy policy.
* ``Baseline1`` - the application baseline: the first action of each
  request, which the service populates in smart-match order.
* ``BaselineRand`` - uniform random over the request's actions.
* ``Hyper`` - candidate (epsilon, learning rate) settings, evaluated by
  replaying the log into a fresh model with progressive validation
  (each event is scored before the model trains on it).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from bidimatch.bandit.events import RankEvent
from bidimatch.bandit.features import ACTION_NAMESPACE, CONTEXT_NAMESPACE, FeatureHasher, attributed_tokens, hash_token
from bidimatch.bandit.model import PolicyModel, predict, sgd_step
from bidimatch.errors import InsufficientEvents, InvalidValue, MissingPropensity

logger = logging.getLogger(__name__)

DEFAULT_MIN_EVENTS = 1_000
# Documented production floor; desk-scale runs use DEFAULT_MIN_EVENTS.
PRODUCTION_MIN_EVENTS = 50_000
DEFAULT_CLIP = 10.0
DEFAULT_APPLY_THRESHOLD = 0.02

STATUS_APPLIED = "Applied"
STATUS_RETAINED = "OnlinePolicyRetained"


class PolicyKind(str, Enum):
    ONLINE = "Online"
    BASELINE1 = "Baseline1"
    BASELINE_RAND = "BaselineRand"
    HYPER = "Hyper"


@dataclass(frozen=True)
class PolicySpec:
    name: str
    kind: PolicyKind
    params: Mapping[str, float] = field(default_factory=dict)

    @classmethod
    def online(cls) -> "PolicySpec":
        return cls("Online", PolicyKind.ONLINE)

    @classmethod
    def baseline1(cls) -> "PolicySpec":
        return cls("Baseline1", PolicyKind.BASELINE1)

    @classmethod
    def baseline_rand(cls) -> "PolicySpec":
        return cls("BaselineRand", PolicyKind.BASELINE_RAND)

    @classmethod
    def hyper(cls, name: str, epsilon: float, learning_rate: float) -> "PolicySpec":
        return cls(name, PolicyKind.HYPER, {"epsilon": epsilon, "learning_rate": learning_rate})


@dataclass(frozen=True)
class PolicyRow:
    policy: str
    estimated_avg_reward: float
    ci_low: float
    ci_high: float
    n_events: int


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[PolicyRow, ...]
    winner: str
    applied: bool = False
    status: str = ""

    def row(self, policy: str) -> PolicyRow:
        for row in self.rows:
            if row.policy == policy:
                return row
        raise KeyError(policy)


@dataclass(frozen=True)
class FeatureEffectivenessRow:
    namespace: str
    feature_name: str
    score: int
    occurrences: int


def _settled_events(log: Iterable[RankEvent]) -> list[RankEvent]:
    return [event for event in log if event.settled()]


def _greedy_index(model: PolicyModel, hasher: FeatureHasher, event: RankEvent) -> int:
    scores = [
        predict(model, hasher.indices(event.context, action.features, event.excluded_features))
        for action in event.actions
    ]
    ids = [action.action_id for action in event.actions]
    return min(range(len(ids)), key=lambda i: (-scores[i], ids[i]))


def _epsilon_greedy_probability(chosen_index: int, greedy_index: int, epsilon: float, count: int) -> float:
    if chosen_index == greedy_index:
        return 1.0 - epsilon + epsilon / count
    return epsilon / count


def policy_probabilities(
    events: Sequence[RankEvent],
    policy: PolicySpec,
    *,
    model: PolicyModel | None = None,
    hasher: FeatureHasher | None = None,
) -> np.ndarray:
    """Probability the target policy picks each event's logged action."""
    if policy.kind is PolicyKind.BASELINE1:
        return np.array(
            [1.0 if e.chosen_action_id == e.actions[0].action_id else 0.0 for e in events], dtype=np.float64
        )
    if policy.kind is PolicyKind.BASELINE_RAND:
        return np.array([1.0 / len(e.actions) for e in events], dtype=np.float64)
    if policy.kind is PolicyKind.ONLINE:
        if model is None:
            raise InvalidValue("model", "the Online policy needs the live model")
        hasher = hasher or FeatureHasher(model.dimension)
        out = np.empty(len(events), dtype=np.float64)
        for i, event in enumerate(events):
            greedy = _greedy_index(model, hasher, event)
            chosen = next(k for k, a in enumerate(event.actions) if a.action_id == event.chosen_action_id)
            out[i] = _epsilon_greedy_probability(chosen, greedy, model.epsilon, len(event.actions))
        return out
    if policy.kind is PolicyKind.HYPER:
        dimension = model.dimension if model is not None else (hasher.dimension if hasher else None)
        if dimension is None:
            raise InvalidValue("dimension", "a Hyper policy needs a model or hasher for the hash dimension")
        hasher = hasher or FeatureHasher(dimension)
        epsilon = float(policy.params.get("epsilon", 0.0))
        learning_rate = float(policy.params.get("learning_rate", 0.05))
        candidate = PolicyModel.zeros(dimension, epsilon, learning_rate)
        out = np.empty(len(events), dtype=np.float64)
        for i, event in enumerate(events):
            greedy = _greedy_index(candidate, hasher, event)
            chosen = next(k for k, a in enumerate(event.actions) if a.action_id == event.chosen_action_id)
            out[i] = _epsilon_greedy_probability(chosen, greedy, epsilon, len(event.actions))
            indices = hasher.indices(event.context, event.actions[chosen].features, event.excluded_features)
            sgd_step(candidate, indices, event.reward)
        return out
    raise InvalidValue("kind", f"unsupported policy kind {policy.kind!r}")


def ips_estimate(
    log: Iterable[RankEvent],
    policy: PolicySpec,
    *,
    model: PolicyModel | None = None,
    hasher: FeatureHasher | None = None,
    min_events: int = DEFAULT_MIN_EVENTS,
    clip: float = DEFAULT_CLIP,
) -> PolicyRow:
    """Clipped IPS estimate and confidence interval for one policy."""
    events = _settled_events(log)
    if len(events) < min_events:
        raise InsufficientEvents(f"{len(events)} settled events, need at least {min_events}")
    propensities = np.array(
        [e.propensity if e.propensity is not None else np.nan for e in events], dtype=np.float64
    )
    if np.any(~np.isfinite(propensities)) or np.any(propensities <= 0.0):
        raise MissingPropensity("every logged event needs a positive propensity")
    rewards = np.array([e.reward for e in events], dtype=np.float64)
    pi = policy_probabilities(events, policy, model=model, hasher=hasher)
    weights = np.minimum(pi / propensities, clip)
    terms = rewards * weights
    estimate = float(terms.mean())
    stderr = float(terms.std(ddof=1) / math.sqrt(len(terms))) if len(terms) > 1 else 0.0
    return PolicyRow(policy.name, estimate, estimate - 1.96 * stderr, estimate + 1.96 * stderr, len(events))


def evaluate_policies(
    log: Iterable[RankEvent],
    specs: Sequence[PolicySpec],
    *,
    model: PolicyModel | None = None,
    hasher: FeatureHasher | None = None,
    min_events: int = DEFAULT_MIN_EVENTS,
    clip: float = DEFAULT_CLIP,
) -> EvalReport:
    """One IPS row per policy spec; the winner has the top estimate."""
    if not specs:
        raise InvalidValue("specs", "at least one policy spec is required")
    events = _settled_events(log)
    rows = tuple(
        ips_estimate(events, spec, model=model, hasher=hasher, min_events=min_events, clip=clip) for spec in specs
    )
    winner = max(rows, key=lambda r: r.estimated_avg_reward)
    return EvalReport(rows=rows, winner=winner.policy)


def default_policy_specs() -> list[PolicySpec]:
    """The mandatory comparison set for reports."""
    return [PolicySpec.online(), PolicySpec.baseline1(), PolicySpec.baseline_rand()]


def auto_optimize(
    log: Iterable[RankEvent],
    grid: Sequence[PolicySpec],
    apply_threshold: float = DEFAULT_APPLY_THRESHOLD,
    *,
    model: PolicyModel,
    hasher: FeatureHasher | None = None,
    min_events: int = DEFAULT_MIN_EVENTS,
    clip: float = DEFAULT_CLIP,
) -> EvalReport:
    """Search the grid against the online policy; apply a clear winner.

    A candidate's settings are applied to the live model only when its
    confidence lower bound beats the online estimate by the threshold;
    otherwise the online policy is retained.
    """
    if not grid:
        raise InvalidValue("grid", "auto-optimize needs at least one candidate policy")
    specs = [PolicySpec.online()] + [s for s in grid if s.kind is PolicyKind.HYPER]
    if len(specs) == 1:
        raise InvalidValue("grid", "auto-optimize grid contained no Hyper policies")
    report = evaluate_policies(log, specs, model=model, hasher=hasher, min_events=min_events, clip=clip)
    online_row = report.row("Online")
    winner_row = report.row(report.winner)
    winner_spec = next((s for s in specs if s.name == report.winner), None)
    if (
        winner_spec is not None
        and winner_spec.kind is PolicyKind.HYPER
        and winner_row.ci_low > online_row.estimated_avg_reward + apply_threshold
    ):
        model.epsilon = float(winner_spec.params.get("epsilon", model.epsilon))
        model.learning_rate = float(winner_spec.params.get("learning_rate", model.learning_rate))
        logger.info(
            "applied policy %s (epsilon=%.3f lr=%.3f)", winner_spec.name, model.epsilon, model.learning_rate
        )
        return EvalReport(report.rows, report.winner, applied=True, status=STATUS_APPLIED)
    return EvalReport(report.rows, report.winner, applied=False, status=STATUS_RETAINED)


def feature_effectiveness(
    model: PolicyModel,
    log: Iterable[RankEvent],
    hasher: FeatureHasher | None = None,
) -> list[FeatureEffectivenessRow]:
    """Per-feature importance (0-100) and event occurrence counts.

    A feature's raw importance is the summed absolute weight over every
    hashed index it owns across the log (crossed indices count for both
    participants); scores are min-max scaled per report.
    """
    dimension = model.dimension
    index_sets: dict[tuple[str, str], set[int]] = {}
    occurrences: dict[tuple[str, str], int] = {}
    seen_pairs: set = set()
    events = list(log)
    for event in events:
        excluded = event.excluded_features
        ctx_sig = tuple(sorted(event.context.items()))
        for key in event.context:
            if key in excluded:
                continue
            owner = (CONTEXT_NAMESPACE, key)
            occurrences[owner] = occurrences.get(owner, 0) + 1
            index_sets.setdefault(owner, set())
        action_keys: set[str] = set()
        for action in event.actions:
            action_keys.update(k for k in action.features if k not in excluded)
            pair_sig = (ctx_sig, tuple(sorted(action.features.items())), excluded)
            if pair_sig in seen_pairs:
                continue
            seen_pairs.add(pair_sig)
            for token, owners in attributed_tokens(event.context, action.features, excluded):
                if not owners:
                    continue
                index = hash_token(token, dimension)
                for owner in owners:
                    index_sets.setdefault(owner, set()).add(index)
        for key in action_keys:
            owner = (ACTION_NAMESPACE, key)
            occurrences[owner] = occurrences.get(owner, 0) + 1
            index_sets.setdefault(owner, set())
    if not index_sets:
        return []
    raw = {
        owner: float(np.abs(model.weights[np.fromiter(idxs, dtype=np.int64)]).sum()) if idxs else 0.0
        for owner, idxs in index_sets.items()
    }
    low, high = min(raw.values()), max(raw.values())
    rows = []
    for owner, value in raw.items():
        if high <= 0.0:
            score = 0
        elif high == low:
            score = 100
        else:
            score = int(round(100.0 * (value - low) / (high - low)))
        rows.append(FeatureEffectivenessRow(owner[0], owner[1], score, occurrences.get(owner, 0)))
    rows.sort(key=lambda r: (-r.score, -r.occurrences, r.namespace, r.feature_name))
    return rows
