"""Gazetteer entity extraction for job ads.

Four entity kinds are extracted: care setting, shift length, shift name
and unit type. Matching scans the *text* left to right, so the first
mention wins regardless of gazetteer iteration order ("OR and ICU"
yields OR). Short all-caps terms (OR, ICU, ER) match case-sensitively so
the conjunction "or" never triggers a unit; longer terms match
case-insensitively on word boundaries.

Gazetteers are editable JSON mapping canonical term -> synonym list; the
bundled file covers the common hospital vocabulary. Shift length is
pattern-based: ``<digits> hour`` or ``<n>x<h>`` (hours taken from the
second number).
"""

from __future__ import annotations

import json
import re
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Mapping

from bidimatch.errors import UnknownKind


class EntityKind(str, Enum):
    CARE_SETTING = "care_setting"
    SHIFT_LENGTH = "shift_length"
    SHIFT_NAME = "shift_name"
    UNIT_TYPE = "unit_type"


Gazetteer = Mapping[str, list[str]]

_SHIFT_LENGTH_PATTERNS = (
    re.compile(r"\b(\d{1,2})\s*(?:-\s*)?(?:hour|hr)s?\b", re.IGNORECASE),
    re.compile(r"\b\d{1,2}\s*x\s*(\d{1,2})\b", re.IGNORECASE),
)


def load_gazetteers(path: str | Path | None = None) -> dict[str, Gazetteer]:
    """Load gazetteers from a JSON file, defaulting to the bundled set."""
    if path is None:
        raw = resources.files("bidimatch").joinpath("data/gazetteers.json").read_text("utf-8")
    else:
        raw = Path(path).read_text("utf-8")
    return json.loads(raw)


@lru_cache(maxsize=4096)
def _term_pattern(term: str) -> re.Pattern:
    # all-caps acronyms stay case-sensitive ("or" must not match OR)
    flags = 0 if term.isupper() else re.IGNORECASE
    return re.compile(rf"(?<![\w]){re.escape(term)}(?![\w])", flags)


def _gazetteer_match(text: str, gazetteer: Gazetteer) -> str | None:
    hits: list[tuple[int, int, str]] = []
    for canonical, synonyms in gazetteer.items():
        for term in [canonical, *synonyms]:
            found = _term_pattern(term).search(text)
            if found:
                hits.append((found.start(), -(found.end() - found.start()), canonical))
    if not hits:
        return None
    hits.sort()
    return hits[0][2]


def _shift_length_match(text: str) -> str | None:
    hits: list[tuple[int, str]] = []
    for pattern in _SHIFT_LENGTH_PATTERNS:
        found = pattern.search(text)
        if found:
            hits.append((found.start(), found.group(1)))
    if not hits:
        return None
    hits.sort()
    return hits[0][1]


def extract_entity(text: str, kind: EntityKind, gazetteers: Mapping[str, Gazetteer]) -> str | None:
    """First-match extraction; returns the canonical term or ``None``."""
    if not isinstance(kind, EntityKind):
        try:
            kind = EntityKind(kind)
        except ValueError as exc:
            raise UnknownKind(str(kind)) from exc
    if kind is EntityKind.SHIFT_LENGTH:
        return _shift_length_match(text)
    gazetteer = gazetteers.get(kind.value)
    if gazetteer is None:
        raise UnknownKind(f"no gazetteer loaded for {kind.value}")
    return _gazetteer_match(text, gazetteer)
