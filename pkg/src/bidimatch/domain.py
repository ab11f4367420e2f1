"""Core entity types: jobs, travelers, facilities.

All types are immutable values, safe to share across threads. Records
serialize to JSON objects with snake_case keys and ISO-8601 dates.
Traveler records never carry demographic attributes: parsing drops them
by construction, so no downstream score or ranking can observe them.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from datetime import date
from enum import Enum
from typing import Any, Iterable, Mapping

from bidimatch.errors import InvalidValue

# Keys stripped from any inbound record before construction. Education
# level, certifications and licenses remain; school identity does not.
DEMOGRAPHIC_KEYS = frozenset(
    {"gender", "sex", "race", "ethnicity", "school", "school_name", "school_attended", "date_of_birth"}
)


class JobStatus(str, Enum):
    OPEN = "Open"
    CLOSED = "Closed"
    ON_HOLD = "OnHold"


class TravelerStatus(str, Enum):
    CURRENT_EMPLOYEE = "CurrentEmployee"
    CURRENT_TRAVELER = "CurrentTraveler"
    PENDING_EMPLOYEE = "PendingEmployee"
    PREVIOUS_EMPLOYEE = "PreviousEmployee"
    INTERESTED_IN_TRAVEL = "InterestedInTravel"
    UNKNOWN = "Unknown"


class Standing(str, Enum):
    OK_TO_USE = "OkToUse"
    NOT_OK = "NotOk"


class FinancialStatus(str, Enum):
    OK = "Ok"
    FINANCIAL_RISK = "FinancialRisk"
    CAUTION = "Caution"


class AccountStatus(str, Enum):
    OK = "Ok"
    PROSPECT = "Prospect"
    DUPLICATE = "Duplicate"


class AssignmentOutcome(str, Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"


def _parse_date(value: Any, key: str) -> date | None:
    if value is None or value == "":
        return None
    if isinstance(value, date):
        return value
    try:
        return date.fromisoformat(str(value)[:10])
    except ValueError as exc:
        raise InvalidValue(key, f"not an ISO-8601 date: {value!r}") from exc


def _parse_enum(enum_cls, value: Any, key: str):
    if isinstance(value, enum_cls):
        return value
    try:
        return enum_cls(value)
    except ValueError as exc:
        allowed = ", ".join(m.value for m in enum_cls)
        raise InvalidValue(key, f"expected one of {allowed}, got {value!r}") from exc


def _as_str_set(value: Any) -> frozenset[str]:
    if value is None:
        return frozenset()
    if isinstance(value, str):
        return frozenset({value}) if value else frozenset()
    return frozenset(str(v) for v in value)


@dataclass(frozen=True)
class Job:
    job_id: str
    job_number: str = ""
    start_date: date | None = None
    positions_open: int = 1
    job_type_name: str = ""
    unit_name: str = ""
    care_setting: str = ""
    shift_name: str = ""
    shift_length_hours: int = 12
    required_skill: str = ""
    license_state: str = ""
    certifications: frozenset[str] = frozenset()
    bill_rate: float = 0.0
    take_home_pay: float = 0.0
    number_of_beds: int = 0
    client_level: str = ""
    facility_id: str = ""
    state: str = ""
    status: JobStatus = JobStatus.OPEN

    def __post_init__(self) -> None:
        if self.positions_open < 0:
            raise InvalidValue("positions_open", "must be non-negative")
        if self.bill_rate < 0:
            raise InvalidValue("bill_rate", "must be non-negative")
        if self.shift_length_hours <= 0:
            raise InvalidValue("shift_length_hours", "must be positive")
        if self.status is JobStatus.OPEN and self.start_date is None:
            raise InvalidValue("start_date", "required while the job is open")

    def to_record(self) -> dict[str, Any]:
        rec = {
            "job_id": self.job_id,
            "job_number": self.job_number,
            "start_date": self.start_date.isoformat() if self.start_date else None,
            "positions_open": self.positions_open,
            "job_type_name": self.job_type_name,
            "unit_name": self.unit_name,
            "care_setting": self.care_setting,
            "shift_name": self.shift_name,
            "shift_length_hours": self.shift_length_hours,
            "required_skill": self.required_skill,
            "license_state": self.license_state,
            "certifications": sorted(self.certifications),
            "bill_rate": self.bill_rate,
            "take_home_pay": self.take_home_pay,
            "number_of_beds": self.number_of_beds,
            "client_level": self.client_level,
            "facility_id": self.facility_id,
            "state": self.state,
            "status": self.status.value,
        }
        return rec

    @classmethod
    def from_record(cls, record: Mapping[str, Any]) -> "Job":
        known = _known_fields(cls, record)
        known["start_date"] = _parse_date(record.get("start_date"), "start_date")
        known["status"] = _parse_enum(JobStatus, record.get("status", JobStatus.OPEN), "status")
        known["certifications"] = _as_str_set(record.get("certifications"))
        return cls(**known)


@dataclass(frozen=True)
class Traveler:
    """A traveling healthcare professional.

    Empty ``desired_states`` / ``licensed_states`` mean "not given" (the
    rule table scores absence distinctly from a mismatch); the remaining
    preference fields use ``None`` for the same purpose.
    """

    contact_id: str
    availability_date: date | None = None
    primary_skill: str = ""
    secondary_skill: str = ""
    desired_states: frozenset[str] = frozenset()
    licensed_states: frozenset[str] = frozenset()
    certifications: frozenset[str] = frozenset()
    desired_shift_name: str | None = None
    desired_shift_length: str | None = None
    preferred_bed_size: int | None = None
    requested_take_home_pay: float | None = None
    traveler_status: TravelerStatus = TravelerStatus.UNKNOWN
    standing: Standing = Standing.OK_TO_USE
    active: bool = True
    available: bool = True
    previous_assignments: tuple[tuple[str, AssignmentOutcome], ...] = ()

    def __post_init__(self) -> None:
        if self.preferred_bed_size is not None and self.preferred_bed_size <= 0:
            raise InvalidValue("preferred_bed_size", "must be positive when given")
        if self.requested_take_home_pay is not None and self.requested_take_home_pay < 0:
            raise InvalidValue("requested_take_home_pay", "must be non-negative when given")

    def to_record(self) -> dict[str, Any]:
        return {
            "contact_id": self.contact_id,
            "availability_date": self.availability_date.isoformat() if self.availability_date else None,
            "primary_skill": self.primary_skill,
            "secondary_skill": self.secondary_skill,
            "desired_states": sorted(self.desired_states),
            "licensed_states": sorted(self.licensed_states),
            "certifications": sorted(self.certifications),
            "desired_shift_name": self.desired_shift_name,
            "desired_shift_length": self.desired_shift_length,
            "preferred_bed_size": self.preferred_bed_size,
            "requested_take_home_pay": self.requested_take_home_pay,
            "traveler_status": self.traveler_status.value,
            "standing": self.standing.value,
            "active": self.active,
            "available": self.available,
            "previous_assignments": [[fid, outcome.value] for fid, outcome in self.previous_assignments],
        }

    @classmethod
    def from_record(cls, record: Mapping[str, Any]) -> "Traveler":
        known = _known_fields(cls, record)
        known["availability_date"] = _parse_date(record.get("availability_date"), "availability_date")
        known["traveler_status"] = _parse_enum(
            TravelerStatus, record.get("traveler_status", TravelerStatus.UNKNOWN), "traveler_status"
        )
        known["standing"] = _parse_enum(Standing, record.get("standing", Standing.OK_TO_USE), "standing")
        for key in ("desired_states", "licensed_states", "certifications"):
            known[key] = _as_str_set(record.get(key))
        assignments = []
        for item in record.get("previous_assignments") or ():
            fid, outcome = item[0], item[1]
            assignments.append((str(fid), _parse_enum(AssignmentOutcome, outcome, "previous_assignments")))
        known["previous_assignments"] = tuple(assignments)
        return cls(**known)


@dataclass(frozen=True)
class Facility:
    facility_id: str
    name: str = ""
    active: bool = True
    financial_status: FinancialStatus = FinancialStatus.OK
    account_status: AccountStatus = AccountStatus.OK
    bed_count: int = 0
    state: str = ""
    reviews: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.bed_count < 0:
            raise InvalidValue("bed_count", "must be non-negative")

    def to_record(self) -> dict[str, Any]:
        return {
            "facility_id": self.facility_id,
            "name": self.name,
            "active": self.active,
            "financial_status": self.financial_status.value,
            "account_status": self.account_status.value,
            "bed_count": self.bed_count,
            "state": self.state,
            "reviews": list(self.reviews),
        }

    @classmethod
    def from_record(cls, record: Mapping[str, Any]) -> "Facility":
        known = _known_fields(cls, record)
        known["financial_status"] = _parse_enum(
            FinancialStatus, record.get("financial_status", FinancialStatus.OK), "financial_status"
        )
        known["account_status"] = _parse_enum(
            AccountStatus, record.get("account_status", AccountStatus.OK), "account_status"
        )
        known["reviews"] = tuple(str(r) for r in record.get("reviews") or ())
        return cls(**known)


def _known_fields(cls, record: Mapping[str, Any]) -> dict[str, Any]:
    """Keep known keys, dropping demographics and anything unrecognized."""
    names = {f.name for f in fields(cls)}
    out = {}
    for key, value in record.items():
        if key in DEMOGRAPHIC_KEYS:
            continue
        if key in names and value is not None:
            out[key] = value
    return out


def load_entities(records: Iterable[Mapping[str, Any]], cls) -> list:
    return [cls.from_record(r) for r in records]
