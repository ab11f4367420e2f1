"""Simulated-recruiter driver and convergence reporting.

Each round picks a random context entity, ranks its smart-match top
candidates, and rewards the surfaced event with the chosen pair's
smart-match total (optionally noised, standing in for a human score).
The driver trains after every round; wall-clock scheduling belongs to
the service, not the experiment. Everything is seeded, so a run is
bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from random import Random
from typing import Sequence

from bidimatch.bandit import ActionCandidate, ContextualBandit, ModelName, RankEvent, RankRequest
from bidimatch.config import EngineConfig
from bidimatch.errors import EmptyLog, EmptyStore
from bidimatch.featurize import job_features, traveler_features
from bidimatch.ids import derive_seed
from bidimatch.smart_match import match_jobs_for_traveler, match_travelers_for_job
from bidimatch.sim.world import World, WorldSpec, generate_world

DEFAULT_BUCKET_SIZE = 500
INITIAL_WINDOW = 500
FINAL_WINDOW = 1000


class FeedbackMode(str, Enum):
    SMART_MATCH = "smartmatch"
    NOISY_USER = "noisy"


@dataclass(frozen=True)
class ConvergenceBucket:
    bucket_start: int
    mae: float
    n: int


@dataclass(frozen=True)
class ConvergenceReport:
    series: tuple[ConvergenceBucket, ...]
    initial_mae: float
    final_mae: float
    calls_per_bucket: int


@dataclass
class SimulationResult:
    model_name: ModelName
    events: list[RankEvent]
    bandit: ContextualBandit
    world: World


@dataclass(frozen=True)
class _ContextArm:
    context: dict
    actions: tuple[ActionCandidate, ...]
    targets: dict[str, float]


def _traveler_model_contexts(world: World, limit: int) -> list[_ContextArm]:
    contexts = []
    for job in world.jobs:
        rows = match_travelers_for_job(job, world.travelers, world.sentiments, config=world.match_config)[:limit]
        travelers = {t.contact_id: t for t in world.travelers}
        actions = tuple(ActionCandidate(row.contact_id, traveler_features(travelers[row.contact_id])) for row in rows)
        targets = {row.contact_id: row.total for row in rows}
        if actions:
            contexts.append(_ContextArm(job_features(job), actions, targets))
    return contexts


def _job_model_contexts(world: World, limit: int) -> list[_ContextArm]:
    contexts = []
    jobs = {j.job_id: j for j in world.jobs}
    for traveler in world.travelers:
        rows = match_jobs_for_traveler(traveler, world.jobs, world.sentiments, config=world.match_config)[:limit]
        actions = tuple(ActionCandidate(row.job_id, job_features(jobs[row.job_id])) for row in rows)
        targets = {row.job_id: row.total for row in rows}
        if actions:
            contexts.append(_ContextArm(traveler_features(traveler), actions, targets))
    return contexts


def simulate(
    model_name: ModelName,
    rounds: int,
    world: World | WorldSpec,
    feedback: FeedbackMode = FeedbackMode.SMART_MATCH,
    *,
    config: EngineConfig | None = None,
    bandit: ContextualBandit | None = None,
) -> SimulationResult:
    """Run the seeded interaction loop and return the event log."""
    if isinstance(world, WorldSpec):
        world = generate_world(world)
    if not world.jobs or not world.travelers:
        raise EmptyStore("simulation world has no jobs or travelers")
    config = config or EngineConfig()
    if bandit is None:
        bandit = ContextualBandit(
            model_name, config, rng=Random(derive_seed(world.spec.seed, "bandit", model_name.value))
        )
    if model_name is ModelName.TRAVELER:
        contexts = _traveler_model_contexts(world, config.max_actions_per_rank)
    else:
        contexts = _job_model_contexts(world, config.max_actions_per_rank)
    if not contexts:
        raise EmptyStore("no eligible contexts in the simulation world")

    driver = Random(derive_seed(world.spec.seed, "driver", model_name.value, feedback.value))
    events: list[RankEvent] = []
    for round_index in range(rounds):
        arm = contexts[driver.randrange(len(contexts))]
        now = float(round_index)
        # deterministic ids keep the whole log bit-reproducible under seed
        event_id = f"sim-{model_name.value}-{world.spec.seed}-{round_index:06d}"
        response = bandit.rank(RankRequest(arm.context, arm.actions, event_id=event_id), now)
        target = arm.targets[response.chosen_action_id]
        if feedback is FeedbackMode.NOISY_USER:
            target = min(1.0, max(0.0, target + driver.gauss(0.0, world.spec.noise_sigma)))
        bandit.reward(response.event_id, target, now)
        bandit.train_pending(now)
        events.append(bandit.events.get(response.event_id))
    return SimulationResult(model_name, events, bandit, world)


def convergence_report(events: Sequence[RankEvent], bucket_size: int = DEFAULT_BUCKET_SIZE) -> ConvergenceReport:
    """Bucketed mean absolute error between served probability and reward."""
    errors = [
        abs(event.probabilities[event.chosen_action_id] - event.reward)
        for event in events
        if event.settled()
    ]
    if not errors:
        raise EmptyLog("no settled events to report on")
    series = tuple(
        ConvergenceBucket(start, _mean(errors[start : start + bucket_size]), len(errors[start : start + bucket_size]))
        for start in range(0, len(errors), bucket_size)
    )
    return ConvergenceReport(
        series=series,
        initial_mae=_mean(errors[:INITIAL_WINDOW]),
        final_mae=_mean(errors[-FINAL_WINDOW:]),
        calls_per_bucket=bucket_size,
    )


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values)


def count_reports(world: World, *, min_total: float = 0.8) -> tuple[list[tuple[str, int]], list[tuple[str, int]]]:
    """Matches-per-job and jobs-per-traveler tables, counts descending.

    A pair counts as a match when its smart-match total reaches
    ``min_total``; pure eligibility would give every pair the same count.
    """
    per_job: dict[str, int] = {}
    per_traveler: dict[str, int] = {t.contact_id: 0 for t in world.travelers}
    for job in world.jobs:
        rows = match_travelers_for_job(job, world.travelers, world.sentiments, config=world.match_config)
        strong = [row for row in rows if row.total >= min_total]
        per_job[job.job_id] = len(strong)
        for row in strong:
            per_traveler[row.contact_id] += 1
    job_table = sorted(per_job.items(), key=lambda kv: (-kv[1], kv[0]))
    traveler_table = sorted(per_traveler.items(), key=lambda kv: (-kv[1], kv[0]))
    return job_table, traveler_table
