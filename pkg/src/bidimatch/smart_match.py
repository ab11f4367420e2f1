"""Deterministic eligibility filtering and twelve-component match scoring.

The score between a traveler and a job is the arithmetic mean of twelve
component scores, each in [0, 1]. The total doubles as a display value
and as the reward label for batch training, so it must stay in [0, 1].

Rule table (component -> score):

* AvailabilityDate while ``diff = start_date - availability_date`` in days:
  0 <= diff <= 30 -> 1.0; 30 < diff <= 60 -> 0.8; otherwise 0.0.
* DesiredState: job state among desired states -> 1.0; none given -> 0.8;
  otherwise 0.0.
* Skill: primary match -> 1.0; secondary match -> 0.8; otherwise 0.0.
* DesiredShift: every given shift preference matches -> 1.0; none given
  -> 0.8; otherwise 0.0.
* LicensedStates: required state licensed -> 1.0; none entered -> 0.8;
  otherwise 0.0.
* Certification: any overlap -> 1.0; otherwise 0.8.
* TravelerStatus: current 1.0, pending 0.8, previous 0.7, interested or
  unknown 0.5.
* HospitalSentiment: pass-through of the facility sentiment score
  (0.5 when absent).
* HospitalBedSize: within the relative tolerance -> 1.0; no preference
  -> 0.8; otherwise 0.0.
* TakeHomePay: offered pay covers the request -> 1.0; otherwise 0.8.
* PreviousAssignment: positive history at the facility -> 1.0; none ->
  0.8; negative -> 0.0 (table-driven).
* ClientLevel: configured lookup; missing entry -> 0.8.

All functions are pure and deterministic over immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from typing import Mapping, Sequence

from bidimatch.config import MatchConfig
from bidimatch.domain import (
    AssignmentOutcome,
    Facility,
    FinancialStatus,
    AccountStatus,
    Job,
    JobStatus,
    Standing,
    Traveler,
    TravelerStatus,
)
from bidimatch.errors import EmptyBreakdown, UnknownKind

DEFAULT_MATCH_CONFIG = MatchConfig()

NEUTRAL_SENTIMENT = 0.5

_STATUS_SCORES = {
    TravelerStatus.CURRENT_EMPLOYEE: 1.0,
    TravelerStatus.CURRENT_TRAVELER: 1.0,
    TravelerStatus.PENDING_EMPLOYEE: 0.8,
    TravelerStatus.PREVIOUS_EMPLOYEE: 0.7,
    TravelerStatus.INTERESTED_IN_TRAVEL: 0.5,
    TravelerStatus.UNKNOWN: 0.5,
}


class ComponentKind(str, Enum):
    AVAILABILITY_DATE = "AvailabilityDate"
    DESIRED_STATE = "DesiredState"
    SKILL = "Skill"
    DESIRED_SHIFT = "DesiredShift"
    LICENSED_STATES = "LicensedStates"
    CERTIFICATION = "Certification"
    TRAVELER_STATUS = "TravelerStatus"
    HOSPITAL_SENTIMENT = "HospitalSentiment"
    HOSPITAL_BED_SIZE = "HospitalBedSize"
    TAKE_HOME_PAY = "TakeHomePay"
    PREVIOUS_ASSIGNMENT = "PreviousAssignment"
    CLIENT_LEVEL = "ClientLevel"


@dataclass(frozen=True)
class MatchBreakdown:
    """Per-component scores plus the aggregate total for one pair."""

    job_id: str
    contact_id: str
    component_scores: Mapping[ComponentKind, float]
    total: float

    def display_total(self) -> float:
        """Total rounded half-up to two decimals for display."""
        return float(Decimal(repr(self.total)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def job_eligible(job: Job, facility: Facility, today: date, *, config: MatchConfig = DEFAULT_MATCH_CONFIG) -> bool:
    """A job is rankable only when its facility and status check out."""
    if not facility.active:
        return False
    if facility.financial_status is not FinancialStatus.OK:
        return False
    if facility.account_status is not AccountStatus.OK:
        return False
    if job.status is not JobStatus.OPEN:
        return False
    if job.start_date is None:
        return False
    horizon = today + timedelta(days=config.start_horizon_days)
    return today <= job.start_date <= horizon


def traveler_eligible(traveler: Traveler) -> bool:
    return traveler.standing is Standing.OK_TO_USE and traveler.active and traveler.available


def score_component(
    kind: ComponentKind,
    traveler: Traveler,
    job: Job,
    facility_sentiment: float | None = None,
    *,
    config: MatchConfig = DEFAULT_MATCH_CONFIG,
) -> float:
    """Score one component of the rule table for a (traveler, job) pair."""
    if kind is ComponentKind.AVAILABILITY_DATE:
        if traveler.availability_date is None or job.start_date is None:
            return 0.0
        diff = (job.start_date - traveler.availability_date).days
        if 0 <= diff <= 30:
            return 1.0
        if 30 < diff <= 60:
            return 0.8
        return 0.0

    if kind is ComponentKind.DESIRED_STATE:
        if not traveler.desired_states:
            return 0.8
        return 1.0 if job.state in traveler.desired_states else 0.0

    if kind is ComponentKind.SKILL:
        if traveler.primary_skill and traveler.primary_skill == job.required_skill:
            return 1.0
        if traveler.secondary_skill and traveler.secondary_skill == job.required_skill:
            return 0.8
        return 0.0

    if kind is ComponentKind.DESIRED_SHIFT:
        given = []
        if traveler.desired_shift_name is not None:
            given.append(traveler.desired_shift_name == job.shift_name)
        if traveler.desired_shift_length is not None:
            given.append(traveler.desired_shift_length == str(job.shift_length_hours))
        if not given:
            return 0.8
        return 1.0 if all(given) else 0.0

    if kind is ComponentKind.LICENSED_STATES:
        if not traveler.licensed_states:
            return 0.8
        required = job.license_state or job.state
        return 1.0 if required in traveler.licensed_states else 0.0

    if kind is ComponentKind.CERTIFICATION:
        return 1.0 if traveler.certifications & job.certifications else 0.8

    if kind is ComponentKind.TRAVELER_STATUS:
        return _STATUS_SCORES[traveler.traveler_status]

    if kind is ComponentKind.HOSPITAL_SENTIMENT:
        return NEUTRAL_SENTIMENT if facility_sentiment is None else float(facility_sentiment)

    if kind is ComponentKind.HOSPITAL_BED_SIZE:
        preferred = traveler.preferred_bed_size
        if preferred is None:
            return 0.8
        rel = abs(job.number_of_beds - preferred) / preferred
        return 1.0 if rel <= config.bed_size_tolerance else 0.0

    if kind is ComponentKind.TAKE_HOME_PAY:
        requested = traveler.requested_take_home_pay
        if requested is None:
            return 1.0
        return 1.0 if job.take_home_pay >= requested else 0.8

    if kind is ComponentKind.PREVIOUS_ASSIGNMENT:
        outcomes = {outcome for fid, outcome in traveler.previous_assignments if fid == job.facility_id}
        if AssignmentOutcome.NEGATIVE in outcomes:
            return config.previous_negative
        if AssignmentOutcome.POSITIVE in outcomes:
            return config.previous_positive
        return config.previous_none

    if kind is ComponentKind.CLIENT_LEVEL:
        return config.client_level_table.get(job.client_level, 0.8)

    raise UnknownKind(str(kind))


def total_score(breakdown: MatchBreakdown) -> float:
    """Arithmetic mean of the present component scores."""
    scores = breakdown.component_scores
    if not scores:
        raise EmptyBreakdown("no component scores present")
    return sum(scores.values()) / len(scores)


def score_pair(
    traveler: Traveler,
    job: Job,
    facility_sentiment: float | None = None,
    *,
    config: MatchConfig = DEFAULT_MATCH_CONFIG,
) -> MatchBreakdown:
    """Compute all twelve components and the total for one pair."""
    scores = {
        kind: score_component(kind, traveler, job, facility_sentiment, config=config) for kind in ComponentKind
    }
    total = sum(scores.values()) / len(scores)
    return MatchBreakdown(job_id=job.job_id, contact_id=traveler.contact_id, component_scores=scores, total=total)


def match_travelers_for_job(
    job: Job,
    pool: Sequence[Traveler],
    sentiments: Mapping[str, float] | None = None,
    *,
    config: MatchConfig = DEFAULT_MATCH_CONFIG,
) -> list[MatchBreakdown]:
    """Score every eligible traveler against an (already eligible) job.

    Sorted by total descending, ties broken by contact id ascending.
    """
    sentiment = (sentiments or {}).get(job.facility_id)
    rows = [
        score_pair(traveler, job, sentiment, config=config)
        for traveler in pool
        if traveler_eligible(traveler)
    ]
    rows.sort(key=lambda b: (-b.total, b.contact_id))
    return rows


def match_jobs_for_traveler(
    traveler: Traveler,
    jobs: Sequence[Job],
    sentiments: Mapping[str, float] | None = None,
    *,
    config: MatchConfig = DEFAULT_MATCH_CONFIG,
) -> list[MatchBreakdown]:
    """Mirror of :func:`match_travelers_for_job` for the inverse direction.

    Jobs are expected to be pre-filtered with :func:`job_eligible`; an
    ineligible traveler yields an empty list.
    """
    if not traveler_eligible(traveler):
        return []
    sentiments = sentiments or {}
    rows = [score_pair(traveler, job, sentiments.get(job.facility_id), config=config) for job in jobs]
    rows.sort(key=lambda b: (-b.total, b.job_id))
    return rows
