"""Feed orchestration: acquire, clean, normalize, extract, persist.

Every raw record yields exactly one job-feed row. Extraction failures
never drop a record: rows missing entities or an unmatched facility are
persisted with ``mapping_complete = False`` so gaps stay visible, and
unmatched names additionally land in the review queue.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping

import httpx

from bidimatch.errors import SourceUnavailable
from bidimatch.feed.markup import clean_markup
from bidimatch.feed.names import Matched, normalize_name
from bidimatch.feed.ner import EntityKind, Gazetteer, extract_entity
from bidimatch.feed.stores import JsonlStore

logger = logging.getLogger(__name__)

FETCH_ATTEMPTS = 3
_BACKOFF_BASE_SECONDS = 0.1


@dataclass(frozen=True)
class RawJobRecord:
    external_identifier: str
    source: str
    payload: str
    fetched_at: float
    facility_name: str | None = None

    def to_record(self) -> dict[str, Any]:
        return {
            "external_identifier": self.external_identifier,
            "source": self.source,
            "payload": self.payload,
            "fetched_at": self.fetched_at,
            "facility_name": self.facility_name,
        }

    @classmethod
    def from_record(cls, record: Mapping[str, Any], *, source: str = "", fetched_at: float = 0.0) -> "RawJobRecord":
        return cls(
            external_identifier=str(record["external_identifier"]),
            source=record.get("source", source),
            payload=record.get("payload", ""),
            fetched_at=float(record.get("fetched_at", fetched_at)),
            facility_name=record.get("facility_name"),
        )


@dataclass(frozen=True)
class JobFeedRow:
    external_identifier: str
    facility_name: str | None
    care_setting: str | None
    shift_length: str | None
    shift_name: str | None
    unit_type: str | None
    description_text: str
    created_at: float
    modified_at: float
    mapping_complete: bool

    def to_record(self) -> dict[str, Any]:
        return {
            "external_identifier": self.external_identifier,
            "facility_name": self.facility_name,
            "care_setting": self.care_setting,
            "shift_length": self.shift_length,
            "shift_name": self.shift_name,
            "unit_type": self.unit_type,
            "description_text": self.description_text,
            "created_at": self.created_at,
            "modified_at": self.modified_at,
            "mapping_complete": self.mapping_complete,
        }


def _parse_feed_payload(text: str) -> list[dict[str, Any]]:
    stripped = text.strip()
    if stripped.startswith("["):
        return json.loads(stripped)
    return [json.loads(line) for line in stripped.splitlines() if line.strip()]


def fetch_raw(
    source: str | Path,
    raw_store: JsonlStore,
    *,
    now: float | None = None,
    client: httpx.Client | None = None,
    sleep=time.sleep,
) -> list[RawJobRecord]:
    """Pull raw ads from a URL or fixture file and persist them verbatim.

    Records hit the raw store before any transformation. Network sources
    get three attempts with exponential backoff before giving up.
    """
    fetched_at = time.time() if now is None else now
    source_str = str(source)
    if source_str.startswith(("http://", "https://")):
        text = _fetch_url(source_str, client, sleep)
    else:
        path = Path(source)
        if not path.is_file():
            raise SourceUnavailable(f"fixture not found: {path}")
        text = path.read_text(encoding="utf-8")
    records = [
        RawJobRecord.from_record(item, source=source_str, fetched_at=fetched_at)
        for item in _parse_feed_payload(text)
    ]
    for record in records:
        raw_store.append(record.to_record())
    logger.info("fetched %d raw records from %s", len(records), source_str)
    return records


def _fetch_url(url: str, client: httpx.Client | None, sleep) -> str:
    own_client = client is None
    client = client or httpx.Client(timeout=10.0)
    try:
        last_error: Exception | None = None
        for attempt in range(FETCH_ATTEMPTS):
            try:
                response = client.get(url)
                response.raise_for_status()
                return response.text
            except httpx.HTTPError as exc:
                last_error = exc
                if attempt < FETCH_ATTEMPTS - 1:
                    sleep(_BACKOFF_BASE_SECONDS * (2**attempt))
        raise SourceUnavailable(f"{url} unreachable after {FETCH_ATTEMPTS} attempts: {last_error}")
    finally:
        if own_client:
            client.close()


def orchestrate(
    raw: RawJobRecord,
    canon: Iterable[str],
    gazetteers: Mapping[str, Gazetteer],
    *,
    jobfeed_store: JsonlStore | None = None,
    review_store: JsonlStore | None = None,
    now: float | None = None,
) -> JobFeedRow:
    """Clean one raw record, map its entities, and persist the row."""
    created_at = time.time() if now is None else now
    text = clean_markup(raw.payload)
    facility_name = None
    if raw.facility_name:
        outcome = normalize_name(raw.facility_name, canon, review_queue=review_store, now=created_at)
        if isinstance(outcome, Matched):
            facility_name = outcome.name
    entities = {
        kind: extract_entity(text, kind, gazetteers)
        for kind in (EntityKind.CARE_SETTING, EntityKind.SHIFT_LENGTH, EntityKind.SHIFT_NAME, EntityKind.UNIT_TYPE)
    }
    complete = facility_name is not None and all(entities[kind] is not None for kind in entities)
    row = JobFeedRow(
        external_identifier=raw.external_identifier,
        facility_name=facility_name,
        care_setting=entities[EntityKind.CARE_SETTING],
        shift_length=entities[EntityKind.SHIFT_LENGTH],
        shift_name=entities[EntityKind.SHIFT_NAME],
        unit_type=entities[EntityKind.UNIT_TYPE],
        description_text=text,
        created_at=created_at,
        modified_at=created_at,
        mapping_complete=complete,
    )
    if jobfeed_store is not None:
        jobfeed_store.append(row.to_record())
    return row


@dataclass(frozen=True)
class ScrubRules:
    """Fields whose values become keyed-hash pseudonyms during replication."""

    fields: tuple[str, ...]
    key: str

    def pseudonym(self, value: str) -> str:
        digest = hmac.new(self.key.encode("utf-8"), value.encode("utf-8"), hashlib.sha256).hexdigest()
        return f"anon-{digest[:12]}"

    def apply(self, record: Mapping[str, Any]) -> dict[str, Any]:
        scrubbed = dict(record)
        for field_name in self.fields:
            value = scrubbed.get(field_name)
            if isinstance(value, str) and value:
                scrubbed[field_name] = self.pseudonym(value)
        return scrubbed


def replicate_scrub(
    src_store: JsonlStore,
    dst_store: JsonlStore,
    scrub_rules: ScrubRules,
    *,
    key_field: str = "external_identifier",
) -> int:
    """Copy rows into the destination with scrubbed identity fields.

    Pseudonyms are deterministic keyed hashes, so joins survive across
    stores. Idempotent: a second run copies only rows that are new or
    changed since the last replication.
    """
    existing: dict[str, str] = {}
    for record in dst_store.read_all():
        existing[str(record.get(key_field))] = json.dumps(record, sort_keys=True)
    copied = 0
    for record in src_store.read_all():
        scrubbed = scrub_rules.apply(record)
        signature = json.dumps(scrubbed, sort_keys=True)
        key = str(scrubbed.get(key_field))
        if existing.get(key) == signature:
            continue
        dst_store.append(scrubbed)
        existing[key] = signature
        copied += 1
    return copied
