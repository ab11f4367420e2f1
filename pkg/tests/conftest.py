"""Shared fixtures: entities, a small seeded world, and a fixture service."""

from __future__ import annotations

from datetime import date, timedelta

import pytest

from bidimatch.config import EngineConfig, MatchConfig
from bidimatch.domain import (
    AccountStatus,
    AssignmentOutcome,
    Facility,
    FinancialStatus,
    Job,
    JobStatus,
    Standing,
    Traveler,
    TravelerStatus,
)
from bidimatch.service.engine import RecommendationService

TODAY = date(2024, 3, 4)


class FakeClock:
    def __init__(self, start: float = 1_000.0):
        self.now = start

    def __call__(self) -> float:
        return self.now

    def advance(self, seconds: float) -> None:
        self.now += seconds


def make_job(job_id="J001", **overrides) -> Job:
    defaults = dict(
        job_id=job_id,
        job_number="216891",
        start_date=TODAY + timedelta(days=14),
        positions_open=2,
        job_type_name="Core",
        unit_name="ICU",
        care_setting="Hospital",
        shift_name="Nights",
        shift_length_hours=12,
        required_skill="RN-ICU",
        license_state="FL",
        certifications=frozenset({"BLS"}),
        bill_rate=165.0,
        take_home_pay=1800.0,
        number_of_beds=350,
        client_level="Standard",
        facility_id="F001",
        state="FL",
        status=JobStatus.OPEN,
    )
    defaults.update(overrides)
    return Job(**defaults)


def make_traveler(contact_id="T001", **overrides) -> Traveler:
    defaults = dict(
        contact_id=contact_id,
        availability_date=TODAY + timedelta(days=5),
        primary_skill="RN-ICU",
        secondary_skill="RN-ER",
        desired_states=frozenset({"FL"}),
        licensed_states=frozenset({"FL"}),
        certifications=frozenset({"BLS"}),
        desired_shift_name="Nights",
        traveler_status=TravelerStatus.CURRENT_TRAVELER,
        standing=Standing.OK_TO_USE,
        active=True,
        available=True,
    )
    defaults.update(overrides)
    return Traveler(**defaults)


def make_facility(facility_id="F001", **overrides) -> Facility:
    defaults = dict(
        facility_id=facility_id,
        name="General Hospital",
        active=True,
        financial_status=FinancialStatus.OK,
        account_status=AccountStatus.OK,
        bed_count=350,
        state="FL",
    )
    defaults.update(overrides)
    return Facility(**defaults)


@pytest.fixture
def clock() -> FakeClock:
    return FakeClock()


@pytest.fixture
def fixture_service(tmp_path, clock) -> RecommendationService:
    """One job with exactly 23 eligible travelers (plus 4 ineligible)."""
    travelers = [make_traveler(f"T{i:03d}", desired_states=frozenset({"FL"} if i % 2 else {"TX"})) for i in range(23)]
    travelers += [
        make_traveler("T900", available=False),
        make_traveler("T901", active=False),
        make_traveler("T902", standing=Standing.NOT_OK),
        make_traveler("T903", available=False, active=False),
    ]
    service = RecommendationService(
        config=EngineConfig(),
        match_config=MatchConfig(),
        jobs=[make_job()],
        travelers=travelers,
        facilities=[make_facility()],
        data_dir=tmp_path / "data",
        today=TODAY,
        seed=5,
        clock=clock,
    )
    return service
