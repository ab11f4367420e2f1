"""Job-feed ingestion: markup cleanup, name normalization, entity extraction."""

from bidimatch.feed.markup import clean_markup
from bidimatch.feed.names import Matched, Queued, ReviewQueueEntry, normalize_name, trigram_cosine
from bidimatch.feed.ner import EntityKind, extract_entity, load_gazetteers
from bidimatch.feed.pipeline import (
    JobFeedRow,
    RawJobRecord,
    ScrubRules,
    fetch_raw,
    orchestrate,
    replicate_scrub,
)
from bidimatch.feed.stores import JsonlStore

__all__ = [
    "EntityKind",
    "JobFeedRow",
    "JsonlStore",
    "Matched",
    "Queued",
    "RawJobRecord",
    "ReviewQueueEntry",
    "ScrubRules",
    "clean_markup",
    "extract_entity",
    "fetch_raw",
    "load_gazetteers",
    "normalize_name",
    "orchestrate",
    "replicate_scrub",
    "trigram_cosine",
]
