"""The recommendation engine behind the HTTP endpoints.

Binds the entity stores, the smart-match filter, and the two bandit
instances. Pages are twenty rows: a page request sends that page's
smart-match slice (the top candidates, capped at fifty overall) to the
model's rank call, returns the rows ordered by model probability, and
carries a live event id per row so feedback can flow back within the
reward window. Successive pages walk the smart-match ordering, so the
union of all pages is exactly the capped candidate set.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from random import Random
from typing import Any, Callable, Mapping

from bidimatch.bandit import ActionCandidate, ContextualBandit, ModelName, RankRequest, RewardAck, RewardSource
from bidimatch.config import EngineConfig, MatchConfig
from bidimatch.domain import Facility, Job, Traveler
from bidimatch.errors import EmptyStore, NoEligibleActions, UnknownJob, UnknownModel, UnknownTraveler
from bidimatch.featurize import job_features, traveler_features
from bidimatch.ids import derive_seed
from bidimatch.offline_eval import (
    EvalReport,
    FeatureEffectivenessRow,
    PolicySpec,
    auto_optimize,
    default_policy_specs,
    evaluate_policies,
    feature_effectiveness,
)
from bidimatch.sentiment import SentimentAnalyzer, facility_sentiment_score
from bidimatch.service.batch import BatchSummary
from bidimatch.smart_match import MatchBreakdown, job_eligible, match_jobs_for_traveler, match_travelers_for_job
from bidimatch.feed.stores import JsonlStore

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RecommendationRow:
    action_id: str
    probability: float
    total_smart_match_score: float
    breakdown: Mapping[str, float]

    def to_wire(self) -> dict[str, Any]:
        return {
            "actionId": self.action_id,
            "probability": self.probability,
            "totalSmartMatchScore": self.total_smart_match_score,
            "breakdown": dict(self.breakdown),
        }


@dataclass(frozen=True)
class RecommendationPage:
    event_ids: tuple[str, ...]
    rows: tuple[RecommendationRow, ...]
    page_index: int
    has_more: bool

    def to_wire(self) -> dict[str, Any]:
        return {
            "eventIds": list(self.event_ids),
            "rows": [row.to_wire() for row in self.rows],
            "pageIndex": self.page_index,
            "hasMore": self.has_more,
        }


def resolve_model_name(name: str) -> ModelName:
    normalized = name.strip().lower().replace("-", "_")
    if normalized in ("traveler", "traveler_model", "travelermodel"):
        return ModelName.TRAVELER
    if normalized in ("job", "job_model", "jobmodel"):
        return ModelName.JOB
    raise UnknownModel(name)


class RecommendationService:
    """Stores + smart match + the two independent bandit models."""

    def __init__(
        self,
        *,
        config: EngineConfig | None = None,
        match_config: MatchConfig | None = None,
        jobs: list[Job] | None = None,
        travelers: list[Traveler] | None = None,
        facilities: list[Facility] | None = None,
        sentiments: Mapping[str, float] | None = None,
        data_dir: str | Path | None = None,
        today: date | None = None,
        seed: int = 0,
        clock: Callable[[], float] = time.time,
    ):
        self.config = config or EngineConfig()
        self.match_config = match_config or MatchConfig()
        self.jobs = {job.job_id: job for job in (jobs or [])}
        self.travelers = {traveler.contact_id: traveler for traveler in (travelers or [])}
        self.facilities = {facility.facility_id: facility for facility in (facilities or [])}
        self.sentiments = dict(sentiments or {})
        self.today = today or date.today()
        self.clock = clock
        self.data_dir = Path(data_dir) if data_dir else None
        self.request_log = JsonlStore(self.data_dir / "requests.jsonl") if self.data_dir else None
        self.models: dict[ModelName, ContextualBandit] = {}
        for name in (ModelName.TRAVELER, ModelName.JOB):
            log_path = self.data_dir / f"events-{name.value}.jsonl" if self.data_dir else None
            snapshot_path = self.data_dir / f"model-{name.value}.snap" if self.data_dir else None
            bandit = ContextualBandit(
                name,
                self.config,
                log_path=log_path,
                rng=Random(derive_seed(seed, "service", name.value)),
                snapshot_path=snapshot_path,
            )
            if snapshot_path is not None and snapshot_path.exists():
                bandit.restore(snapshot_path)
            self.models[name] = bandit
        self._last_train_time: dict[ModelName, float] = {}

    # -- construction ----------------------------------------------------

    @classmethod
    def from_directory(
        cls,
        data_dir: str | Path,
        *,
        config: EngineConfig | None = None,
        match_config: MatchConfig | None = None,
        seed: int = 0,
        clock: Callable[[], float] = time.time,
    ) -> "RecommendationService":
        """Load entity stores (and model state) from a data directory."""
        root = Path(data_dir)
        jobs = [Job.from_record(r) for r in _read_jsonl(root / "jobs.jsonl")]
        travelers = [Traveler.from_record(r) for r in _read_jsonl(root / "travelers.jsonl")]
        facilities = [Facility.from_record(r) for r in _read_jsonl(root / "facilities.jsonl")]
        sentiments: dict[str, float] = {}
        review_rows = _read_jsonl(root / "reviews.jsonl")
        if review_rows:
            analyzer = SentimentAnalyzer()
            for row in review_rows:
                results = [analyzer.analyze(text) for text in row.get("reviews", []) if text.strip()]
                sentiments[row["facility_id"]] = facility_sentiment_score(results)
        today = None
        meta_path = root / "meta.json"
        if meta_path.exists():
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
            if meta.get("today"):
                today = date.fromisoformat(meta["today"])
        return cls(
            config=config,
            match_config=match_config,
            jobs=jobs,
            travelers=travelers,
            facilities=facilities,
            sentiments=sentiments,
            data_dir=root,
            today=today,
            seed=seed,
            clock=clock,
        )

    # -- recommendation pages ---------------------------------------------

    def _job_candidates(self, job: Job) -> list[MatchBreakdown]:
        facility = self.facilities.get(job.facility_id)
        if facility is None or not job_eligible(job, facility, self.today, config=self.match_config):
            return []
        rows = match_travelers_for_job(job, list(self.travelers.values()), self.sentiments, config=self.match_config)
        return rows[: self.config.max_actions_per_rank]

    def _traveler_candidates(self, traveler: Traveler) -> list[MatchBreakdown]:
        eligible_jobs = [
            job
            for job in self.jobs.values()
            if (facility := self.facilities.get(job.facility_id)) is not None
            and job_eligible(job, facility, self.today, config=self.match_config)
        ]
        rows = match_jobs_for_traveler(traveler, eligible_jobs, self.sentiments, config=self.match_config)
        return rows[: self.config.max_actions_per_rank]

    def recommend_travelers(self, query: Mapping[str, Any], page: int = 0, now: float | None = None) -> RecommendationPage:
        """Travelers-for-job page backed by the traveler model."""
        job = self._resolve_job(query)
        candidates = self._job_candidates(job)
        return self._page(
            ModelName.TRAVELER,
            context=job_features(job),
            candidates=candidates,
            id_of=lambda row: row.contact_id,
            features_of=lambda row: traveler_features(self.travelers[row.contact_id]),
            page=page,
            now=now,
        )

    def recommend_jobs(self, query: Mapping[str, Any], page: int = 0, now: float | None = None) -> RecommendationPage:
        """Jobs-for-traveler page backed by the job model."""
        traveler = self._resolve_traveler(query)
        candidates = self._traveler_candidates(traveler)
        return self._page(
            ModelName.JOB,
            context=traveler_features(traveler),
            candidates=candidates,
            id_of=lambda row: row.job_id,
            features_of=lambda row: job_features(self.jobs[row.job_id]),
            page=page,
            now=now,
        )

    def _page(
        self,
        model_name: ModelName,
        *,
        context: dict[str, Any],
        candidates: list[MatchBreakdown],
        id_of,
        features_of,
        page: int,
        now: float | None,
    ) -> RecommendationPage:
        if not candidates:
            raise NoEligibleActions("no eligible candidates for this query")
        if page < 0:
            raise NoEligibleActions(f"page {page} out of range")
        size = self.config.page_size
        page_slice = candidates[page * size : (page + 1) * size]
        has_more = (page + 1) * size < len(candidates)
        if not page_slice:
            return RecommendationPage((), (), page, False)
        by_id = {id_of(row): row for row in page_slice}
        actions = tuple(ActionCandidate(action_id, features_of(row)) for action_id, row in by_id.items())
        response = self.models[model_name].rank(RankRequest(context, actions), now if now is not None else self.clock())
        rows = tuple(
            RecommendationRow(
                action_id=entry.action_id,
                probability=entry.probability,
                total_smart_match_score=by_id[entry.action_id].display_total(),
                breakdown={kind.value: score for kind, score in by_id[entry.action_id].component_scores.items()},
            )
            for entry in response.ranking
        )
        return RecommendationPage(tuple(response.event_id for _ in rows), rows, page, has_more)

    def _resolve_job(self, query: Mapping[str, Any]) -> Job:
        job_id = query.get("jobId") or query.get("job_id")
        if job_id is not None:
            job = self.jobs.get(str(job_id))
            if job is None:
                raise UnknownJob(str(job_id))
            return job
        inline = query.get("job")
        if inline is not None:
            return Job.from_record(inline)
        raise UnknownJob("query names no job")

    def _resolve_traveler(self, query: Mapping[str, Any]) -> Traveler:
        contact_id = query.get("contactId") or query.get("contact_id")
        if contact_id is not None:
            traveler = self.travelers.get(str(contact_id))
            if traveler is None:
                raise UnknownTraveler(str(contact_id))
            return traveler
        inline = query.get("traveler")
        if inline is not None:
            return Traveler.from_record(inline)
        raise UnknownTraveler("query names no traveler")

    # -- rewards and upkeep -------------------------------------------------

    def reward(self, model_name: ModelName, event_id: str, value: float, now: float | None = None) -> RewardAck:
        return self.models[model_name].reward(event_id, value, now if now is not None else self.clock())

    def maintenance(self, now: float | None = None) -> None:
        """Expire reward windows and train on the due cadence."""
        moment = now if now is not None else self.clock()
        for name, bandit in self.models.items():
            bandit.expire_events(moment)
            last = self._last_train_time.get(name, 0.0)
            if moment - last >= bandit.update_interval():
                bandit.train_pending(moment)
                self._last_train_time[name] = moment

    def save_models(self) -> None:
        for bandit in self.models.values():
            if bandit._snapshot_path is not None:
                bandit.snapshot()

    # -- batch training -------------------------------------------------------

    def run_batch_training(self, model_name: ModelName, n_contexts: int, seed: int = 0) -> BatchSummary:
        """Randomly sampled contexts ranked and rewarded with match labels.

        Stored user feedback for an identical (context, action) pair takes
        precedence over the smart-match label. The rank event itself is
        rewarded (source Batch) so it cannot decay to the default reward.
        """
        bandit = self.models[model_name]
        if model_name is ModelName.TRAVELER:
            pool = sorted(self.jobs.values(), key=lambda j: j.job_id)
        else:
            pool = sorted(self.travelers.values(), key=lambda t: t.contact_id)
        if not pool:
            raise EmptyStore(f"no contexts available for {model_name.value}")
        feedback_index = self._user_feedback_index(bandit)
        rng = Random(derive_seed(seed, "batch", model_name.value))
        contexts = rank_calls = rewards_sent = 0
        for _ in range(n_contexts):
            entity = pool[rng.randrange(len(pool))]
            contexts += 1
            if model_name is ModelName.TRAVELER:
                candidates = self._job_candidates(entity)
                context = job_features(entity)
                actions = tuple(
                    ActionCandidate(row.contact_id, traveler_features(self.travelers[row.contact_id]))
                    for row in candidates
                )
                labels = {row.contact_id: row.total for row in candidates}
            else:
                candidates = self._traveler_candidates(entity)
                context = traveler_features(entity)
                actions = tuple(
                    ActionCandidate(row.job_id, job_features(self.jobs[row.job_id])) for row in candidates
                )
                labels = {row.job_id: row.total for row in candidates}
            if not actions:
                continue
            context_signature = tuple(sorted(context.items()))
            for action_id in labels:
                stored = feedback_index.get((context_signature, action_id))
                if stored is not None:
                    labels[action_id] = stored
            now = self.clock()
            response = bandit.rank(RankRequest(context, actions), now)
            rank_calls += 1
            bandit.reward(response.event_id, labels[response.chosen_action_id], now, source=RewardSource.BATCH)
            bandit.train_pending(now)
            rewards_sent += bandit.apprentice_train(context, actions, labels)
        summary = BatchSummary(contexts=contexts, rank_calls=rank_calls, rewards_sent=rewards_sent)
        logger.info("batch training %s: %s", model_name.value, summary)
        return summary

    def run_weekly_batch(self, n_contexts: int = 25) -> dict[ModelName, BatchSummary]:
        return {name: self.run_batch_training(name, n_contexts, seed=int(self.clock())) for name in self.models}

    @staticmethod
    def _user_feedback_index(bandit: ContextualBandit) -> dict[tuple, float]:
        index: dict[tuple, float] = {}
        for event in bandit.events:
            if event.settled() and event.reward_source is RewardSource.USER:
                signature = tuple(sorted(event.context.items()))
                index[(signature, event.chosen_action_id)] = event.reward
        return index

    # -- reports ---------------------------------------------------------------

    def feature_report(self, model_name: ModelName) -> list[FeatureEffectivenessRow]:
        bandit = self.models[model_name]
        return feature_effectiveness(bandit.model, list(bandit.events), bandit.hasher)

    def eval_report(
        self,
        model_name: ModelName,
        specs: list[PolicySpec] | None = None,
        *,
        min_events: int | None = None,
    ) -> EvalReport:
        bandit = self.models[model_name]
        return evaluate_policies(
            list(bandit.events),
            specs or default_policy_specs(),
            model=bandit.model,
            hasher=bandit.hasher,
            **({"min_events": min_events} if min_events is not None else {}),
        )

    def auto_optimize_report(
        self,
        model_name: ModelName,
        grid: list[PolicySpec],
        apply_threshold: float = 0.02,
        *,
        min_events: int | None = None,
    ) -> EvalReport:
        bandit = self.models[model_name]
        return auto_optimize(
            list(bandit.events),
            grid,
            apply_threshold,
            model=bandit.model,
            hasher=bandit.hasher,
            **({"min_events": min_events} if min_events is not None else {}),
        )

    # -- request audit log -------------------------------------------------------

    def log_request(self, record: dict[str, Any]) -> None:
        if self.request_log is not None:
            record.setdefault("ts", self.clock())
            self.request_log.append(record)


def _read_jsonl(path: Path) -> list[dict]:
    if not path.exists():
        return []
    with path.open("r", encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]
