"""Seeded synthetic world generation.

Feature pools are sized so smart-match totals spread across roughly
[0.5, 1.0]: five components vary through attributes the bandit can
observe (availability window, desired state, skill, shift preference,
traveler status) while the rest sit at their fixed rule values. The
same seed always produces byte-identical stores.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path
from random import Random

from bidimatch.config import MatchConfig
from bidimatch.domain import Facility, Job, Traveler, TravelerStatus
from bidimatch.ids import derive_seed
from bidimatch.sentiment import SentimentAnalyzer, facility_sentiment_score

WORLD_EPOCH = date(2024, 3, 4)

SKILLS = ["RN-ICU", "RN-ER", "RN-MedSurg", "RespiratoryTherapist", "PhysicalTherapist"]
STATES = ["FL", "TX", "CA", "NY", "WA", "AZ"]
SHIFTS = ["Days", "Nights", "Mids"]
START_OFFSETS = [7, 20, 35, 50, 70]
AVAILABILITY_OFFSETS = [0, 5, 12, 25, 40]
TRAVELER_STATUSES = [
    TravelerStatus.CURRENT_TRAVELER,
    TravelerStatus.PENDING_EMPLOYEE,
    TravelerStatus.PREVIOUS_EMPLOYEE,
    TravelerStatus.UNKNOWN,
]

POSITIVE_REVIEWS = [
    "Great team and a supportive manager. The ICU was organized and the equipment modern.",
    "Wonderful facility! Clean units and friendly staff everywhere.",
    "I enjoyed my assignment. Helpful charge nurses and a safe environment.",
]
NEGATIVE_REVIEWS = [
    "Understaffed and chaotic. The Oncology unit felt neglected and the break room was dirty.",
    "Terrible scheduling and unhelpful management. Equipment in disrepair.",
    "Stressful shifts, rude supervisors, and outdated facilities.",
]


@dataclass(frozen=True)
class WorldSpec:
    seed: int = 7
    n_jobs: int = 60
    n_travelers: int = 150
    n_facilities: int = 12
    review_density: float = 0.0
    noise_sigma: float = 0.05

    def __post_init__(self) -> None:
        if min(self.n_jobs, self.n_travelers, self.n_facilities) <= 0:
            raise ValueError("entity counts must be positive")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be non-negative")


@dataclass
class World:
    spec: WorldSpec
    today: date
    jobs: list[Job]
    travelers: list[Traveler]
    facilities: dict[str, Facility]
    reviews: dict[str, list[str]]
    sentiments: dict[str, float]
    match_config: MatchConfig = field(default_factory=MatchConfig)

    def save(self, directory: str | Path) -> None:
        target = Path(directory)
        target.mkdir(parents=True, exist_ok=True)
        _write_jsonl(target / "jobs.jsonl", (j.to_record() for j in self.jobs))
        _write_jsonl(target / "travelers.jsonl", (t.to_record() for t in self.travelers))
        _write_jsonl(target / "facilities.jsonl", (f.to_record() for f in self.facilities.values()))
        reviews = [{"facility_id": fid, "reviews": texts} for fid, texts in sorted(self.reviews.items())]
        _write_jsonl(target / "reviews.jsonl", reviews)
        meta = {"today": self.today.isoformat(), "seed": self.spec.seed}
        (target / "meta.json").write_text(json.dumps(meta, sort_keys=True) + "\n", encoding="utf-8")


def _write_jsonl(path: Path, records) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def generate_world(spec: WorldSpec) -> World:
    rng = Random(derive_seed(spec.seed, "world"))
    facilities: dict[str, Facility] = {}
    for i in range(spec.n_facilities):
        facility_id = f"F{i:03d}"
        facilities[facility_id] = Facility(
            facility_id=facility_id,
            name=f"General Hospital {i:03d}",
            bed_count=rng.choice([120, 250, 400, 650]),
            state=rng.choice(STATES),
        )
    facility_ids = sorted(facilities)

    jobs: list[Job] = []
    for i in range(spec.n_jobs):
        facility = facilities[rng.choice(facility_ids)]
        state = facility.state
        jobs.append(
            Job(
                job_id=f"J{i:03d}",
                job_number=f"{210000 + i}",
                start_date=WORLD_EPOCH + timedelta(days=rng.choice(START_OFFSETS)),
                positions_open=rng.choice([1, 1, 2, 3]),
                job_type_name="Core",
                unit_name=rng.choice(["ICU", "ER", "Med/Surg"]),
                care_setting="Hospital",
                shift_name=rng.choice(SHIFTS),
                shift_length_hours=12,
                required_skill=rng.choice(SKILLS),
                license_state=state,
                certifications=frozenset({"BLS"}),
                bill_rate=round(rng.uniform(120.0, 190.0), 2),
                take_home_pay=round(rng.uniform(1400.0, 2100.0), 2),
                number_of_beds=facility.bed_count,
                client_level="Standard",
                facility_id=facility.facility_id,
                state=state,
            )
        )

    travelers: list[Traveler] = []
    for i in range(spec.n_travelers):
        desired = rng.sample(STATES, rng.choice([0, 1, 2]))
        travelers.append(
            Traveler(
                contact_id=f"T{i:03d}",
                availability_date=WORLD_EPOCH + timedelta(days=rng.choice(AVAILABILITY_OFFSETS)),
                primary_skill=rng.choice(SKILLS),
                secondary_skill=rng.choice(SKILLS),
                desired_states=frozenset(desired),
                certifications=frozenset({"BLS"}),
                desired_shift_name=rng.choice(SHIFTS + [None]),
                traveler_status=rng.choice(TRAVELER_STATUSES),
            )
        )

    reviews: dict[str, list[str]] = {}
    sentiments: dict[str, float] = {}
    if spec.review_density > 0:
        analyzer = SentimentAnalyzer()
        per_facility = max(1, round(spec.review_density * 6))
        for facility_id in facility_ids:
            texts = [
                rng.choice(POSITIVE_REVIEWS if rng.random() < 0.6 else NEGATIVE_REVIEWS)
                for _ in range(per_facility)
            ]
            reviews[facility_id] = texts
            sentiments[facility_id] = facility_sentiment_score([analyzer.analyze(t) for t in texts])

    return World(
        spec=spec,
        today=WORLD_EPOCH,
        jobs=jobs,
        travelers=travelers,
        facilities=facilities,
        reviews=reviews,
        sentiments=sentiments,
    )
