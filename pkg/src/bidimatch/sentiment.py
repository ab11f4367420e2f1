"""Lexicon-based sentiment analysis with aspect (unit) opinion mining.

Replaces the hosted sentiment service with a local engine: sentences are
split on terminal punctuation, each sentence gets a polarity from a
bundled word-polarity lexicon (negation within a three-token window flips
polarity), and unit/department mentions inherit their sentence's
polarity. Confidence numbers are normalized lexicon votes, so labels are
comparable to the hosted service but the decimals are not.

The external JSON shape (``overallSentiment``, ``overallSentimentName``,
``overallConfidenceScores``, ``sentences``) mirrors the upstream wire
format; label integers are Positive=0, Neutral=1, Negative=2, Mixed=3.
The Neutral integer is our own assignment: the upstream mapping shows
0, 2 and 3 only.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Iterable, Mapping, Sequence

from bidimatch.errors import EmptyText

_WORD_RE = re.compile(r"[a-z']+")
_SENTENCE_SPLIT_RE = re.compile(r"(?<=[.!?])\s+")
NEGATION_WINDOW = 3

_NEGATORS = frozenset(
    "not no never none nothing nobody cannot can't won't don't doesn't didn't isn't wasn't "
    "aren't weren't ain't shouldn't couldn't wouldn't haven't hasn't hadn't".split()
)

# Suffixes tried at lookup so inflections resolve to bundled entries.
_STRIP_SUFFIXES = ("ly", "ness", "est", "er", "ing", "ed", "es", "s")


class SentimentLabel(str, Enum):
    POSITIVE = "Positive"
    NEUTRAL = "Neutral"
    NEGATIVE = "Negative"
    MIXED = "Mixed"


_LABEL_CODES = {
    SentimentLabel.POSITIVE: 0,
    SentimentLabel.NEUTRAL: 1,
    SentimentLabel.NEGATIVE: 2,
    SentimentLabel.MIXED: 3,
}


@dataclass(frozen=True)
class SentenceSentiment:
    text: str
    label: SentimentLabel
    confidence: Mapping[str, float]
    opinions: tuple[tuple[str, SentimentLabel], ...] = ()


@dataclass(frozen=True)
class SentimentResult:
    overall_label: SentimentLabel
    overall_confidence: Mapping[str, float]
    sentences: tuple[SentenceSentiment, ...]

    def to_wire(self) -> dict:
        """Serialize using the external field names."""
        return {
            "overallSentiment": _LABEL_CODES[self.overall_label],
            "overallSentimentName": self.overall_label.value,
            "overallConfidenceScores": dict(self.overall_confidence),
            "sentences": [
                {
                    "sentiment": _LABEL_CODES[s.label],
                    "sentimentName": s.label.value,
                    "text": s.text,
                    "confidenceScores": dict(s.confidence),
                    "opinions": [
                        {"target": target, "sentimentName": pol.value, "sentiment": _LABEL_CODES[pol]}
                        for target, pol in s.opinions
                    ],
                }
                for s in self.sentences
            ],
        }

    def to_wire_json(self) -> str:
        return json.dumps(self.to_wire(), indent=2)


def _load_bundled_lexicon() -> dict[str, int]:
    lexicon: dict[str, int] = {}
    text = resources.files("bidimatch").joinpath("data/sentiment_lexicon.txt").read_text("utf-8")
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        token, _, polarity = line.partition("\t")
        lexicon[token] = 1 if polarity.strip() == "+1" else -1
    return lexicon


def _load_bundled_units() -> frozenset[str]:
    raw = resources.files("bidimatch").joinpath("data/gazetteers.json").read_text("utf-8")
    units = json.loads(raw)["unit_type"]
    names = set(units)
    for synonyms in units.values():
        names.update(synonyms)
    return frozenset(names)


def split_sentences(text: str) -> list[str]:
    """Split on ``.``, ``!``, ``?`` followed by whitespace."""
    return [part.strip() for part in _SENTENCE_SPLIT_RE.split(text.strip()) if part.strip()]


class SentimentAnalyzer:
    """Stateless after construction; the lexicon is shared immutable data."""

    def __init__(self, lexicon: Mapping[str, int] | None = None, unit_gazetteer: Iterable[str] | None = None):
        self._lexicon = dict(lexicon) if lexicon is not None else _load_bundled_lexicon()
        self._units = frozenset(unit_gazetteer) if unit_gazetteer is not None else _load_bundled_units()

    def _polarity(self, token: str) -> int:
        if token in self._lexicon:
            return self._lexicon[token]
        for suffix in _STRIP_SUFFIXES:
            if token.endswith(suffix) and len(token) - len(suffix) >= 3:
                stem = token[: -len(suffix)]
                if stem in self._lexicon:
                    return self._lexicon[stem]
        return 0

    def _score_sentence(self, sentence: str) -> tuple[SentimentLabel, dict[str, float], int]:
        tokens = _WORD_RE.findall(sentence.lower())
        pos = neg = 0
        for i, token in enumerate(tokens):
            polarity = self._polarity(token)
            if polarity == 0:
                continue
            window = tokens[max(0, i - NEGATION_WINDOW):i]
            if any(t in _NEGATORS for t in window):
                polarity = -polarity
            if polarity > 0:
                pos += 1
            else:
                neg += 1
        if pos == neg:
            if pos == 0:
                return SentimentLabel.NEUTRAL, {"positive": 0.0, "neutral": 1.0, "negative": 0.0}, len(tokens)
            half = pos + neg
            dist = {"positive": pos / (2 * half), "neutral": 0.5, "negative": neg / (2 * half)}
            return SentimentLabel.NEUTRAL, dist, len(tokens)
        total = pos + neg
        dist = {"positive": pos / total, "neutral": 0.0, "negative": neg / total}
        label = SentimentLabel.POSITIVE if pos > neg else SentimentLabel.NEGATIVE
        return label, dist, len(tokens)

    def analyze(self, text: str, include_opinion_mining: bool = False) -> SentimentResult:
        """Analyze a review: per-sentence polarity plus the document label.

        Overall label: Positive when every sentence is Positive or Neutral
        with at least one Positive (Negative symmetric), Neutral when all
        sentences are Neutral, Mixed when both polarities appear. Overall
        confidence is the token-length-weighted mean of the sentence
        distributions.
        """
        if not text or not text.strip():
            raise EmptyText("sentiment analysis requires non-empty text")
        sentences = []
        weights = []
        for sentence_text in split_sentences(text):
            label, dist, n_tokens = self._score_sentence(sentence_text)
            opinions: tuple[tuple[str, SentimentLabel], ...] = ()
            if include_opinion_mining:
                opinions = tuple(
                    (unit, label) for unit in self._units_in_sentence(sentence_text)
                )
            sentences.append(SentenceSentiment(sentence_text, label, dist, opinions))
            weights.append(max(n_tokens, 1))
        labels = {s.label for s in sentences}
        if SentimentLabel.POSITIVE in labels and SentimentLabel.NEGATIVE in labels:
            overall = SentimentLabel.MIXED
        elif SentimentLabel.POSITIVE in labels:
            overall = SentimentLabel.POSITIVE
        elif SentimentLabel.NEGATIVE in labels:
            overall = SentimentLabel.NEGATIVE
        else:
            overall = SentimentLabel.NEUTRAL
        total_weight = sum(weights)
        overall_dist = {
            key: sum(s.confidence[key] * w for s, w in zip(sentences, weights)) / total_weight
            for key in ("positive", "neutral", "negative")
        }
        return SentimentResult(overall, overall_dist, tuple(sentences))

    def _units_in_sentence(self, sentence: str) -> list[str]:
        found = []
        lowered = sentence.lower()
        for unit in sorted(self._units):
            if re.search(rf"(?<![\w]){re.escape(unit.lower())}(?![\w])", lowered):
                found.append(unit)
        return found

    def unit_opinions(
        self, review: str, unit_gazetteer: Iterable[str] | None = None
    ) -> list[tuple[str, SentimentLabel]]:
        """Aspect opinions: each unit mention inherits its sentence polarity.

        One entry per (unit, sentence) hit, in sentence order.
        """
        units = frozenset(unit_gazetteer) if unit_gazetteer is not None else self._units
        hits: list[tuple[str, SentimentLabel]] = []
        for sentence_text in split_sentences(review):
            label, _, _ = self._score_sentence(sentence_text)
            lowered = sentence_text.lower()
            for unit in sorted(units):
                if re.search(rf"(?<![\w]){re.escape(unit.lower())}(?![\w])", lowered):
                    hits.append((unit, label))
        return hits


def facility_sentiment_score(reviews: Sequence[SentimentResult]) -> float:
    """Mean positive confidence across reviews; neutral 0.5 when empty."""
    if not reviews:
        return 0.5
    return sum(r.overall_confidence["positive"] for r in reviews) / len(reviews)
