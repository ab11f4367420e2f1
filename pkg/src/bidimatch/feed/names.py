"""Facility-name normalization by character-trigram cosine similarity.

Misspelled feed names match their canonical form when the trigram cosine
reaches the 0.70 review threshold; anything below lands in the human
review queue instead of silently joining the wrong facility. Names are
lowercased with collapsed whitespace and padded with boundary markers,
which keeps single-token typos (where token-level cosine fails) within
reach.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from math import sqrt
from typing import Iterable

REVIEW_THRESHOLD = 0.70
_PAD = "##"


@dataclass(frozen=True)
class ReviewQueueEntry:
    candidate_name: str
    best_match: str
    similarity: float
    created_at: float
    resolved: bool = False

    def to_record(self) -> dict:
        return {
            "candidate_name": self.candidate_name,
            "best_match": self.best_match,
            "similarity": self.similarity,
            "created_at": self.created_at,
            "resolved": self.resolved,
        }


@dataclass(frozen=True)
class Matched:
    name: str
    similarity: float


@dataclass(frozen=True)
class Queued:
    entry: ReviewQueueEntry


def trigram_counts(name: str) -> Counter:
    normalized = _PAD + " ".join(name.lower().split()) + _PAD
    return Counter(normalized[i : i + 3] for i in range(len(normalized) - 2))


def trigram_cosine(a: str, b: str) -> float:
    u, v = trigram_counts(a), trigram_counts(b)
    if not u or not v:
        return 0.0
    dot = sum(count * v[gram] for gram, count in u.items())
    # single sqrt keeps perfect-square norms exact at the review threshold
    norm = sqrt(sum(c * c for c in u.values()) * sum(c * c for c in v.values()))
    return dot / norm if norm else 0.0


def normalize_name(
    candidate: str,
    canon: Iterable[str],
    *,
    threshold: float = REVIEW_THRESHOLD,
    review_queue=None,
    now: float = 0.0,
) -> Matched | Queued:
    """Match a candidate against the canonical set or queue it for review.

    The best canonical name wins at ``similarity >= threshold``; below it
    a :class:`ReviewQueueEntry` is written to ``review_queue`` (when
    given) and returned.
    """
    canon = sorted(canon)
    if not canon:
        raise ValueError("canonical name set must not be empty")
    best_name, best_sim = min(
        ((name, trigram_cosine(candidate, name)) for name in canon),
        key=lambda pair: (-pair[1], pair[0]),
    )
    if best_sim >= threshold:
        return Matched(best_name, best_sim)
    entry = ReviewQueueEntry(candidate, best_name, best_sim, now)
    if review_queue is not None:
        review_queue.append(entry.to_record())
    return Queued(entry)
