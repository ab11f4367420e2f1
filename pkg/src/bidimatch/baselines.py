"""Classical baseline recommenders.

Two baselines kept alongside the bandit for comparison and sanity
checks: a TF-IDF + cosine content recommender over skill documents, and
user-based collaborative filtering over sentiment-derived facility
ratings in [0, 1].

TF-IDF uses the natural log (the base only rescales weights and cosine
similarity is scale-invariant). The collaborative-filtering prediction
divides the similarity-weighted rating sum by the *number* of
contributing ratings; the conventional sum-of-similarities divisor is
available behind ``divisor="sim_sum"``. Predictions are clamped to
[0, 1] as a safety net (cosine keeps similarities at most 1, so the
count divisor cannot overshoot, but the clamp makes that a guarantee).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from bidimatch.errors import EmptyCorpus, InvalidValue, NoNeighbors, UnfittedModel, UnknownTraveler

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class TfidfModel:
    vocabulary: Mapping[str, int]
    doc_freq: Mapping[str, int]
    n_docs: int
    doc_vectors: Mapping[str, Mapping[int, float]]


def tfidf_fit(corpus: Mapping[str, str]) -> TfidfModel:
    """Fit term weights ``tf * ln(N / df)`` with L2-normalized documents."""
    if not corpus:
        raise EmptyCorpus("cannot fit TF-IDF on an empty corpus")
    doc_tokens = {doc_id: tokenize(text) for doc_id, text in corpus.items()}
    doc_freq: dict[str, int] = {}
    for tokens in doc_tokens.values():
        for term in set(tokens):
            doc_freq[term] = doc_freq.get(term, 0) + 1
    vocabulary = {term: index for index, term in enumerate(sorted(doc_freq))}
    n_docs = len(corpus)
    doc_vectors: dict[str, dict[int, float]] = {}
    for doc_id, tokens in doc_tokens.items():
        counts: dict[str, int] = {}
        for term in tokens:
            counts[term] = counts.get(term, 0) + 1
        vector = {
            vocabulary[term]: tf * math.log(n_docs / doc_freq[term])
            for term, tf in counts.items()
        }
        doc_vectors[doc_id] = _l2_normalize(vector)
    return TfidfModel(vocabulary, doc_freq, n_docs, doc_vectors)


def _l2_normalize(vector: Mapping[int, float]) -> dict[int, float]:
    norm = math.sqrt(sum(v * v for v in vector.values()))
    if norm == 0.0:
        return {}
    return {k: v / norm for k, v in vector.items()}


def cosine_similarity(u: Mapping, v: Mapping) -> float:
    """``u.v / (|u||v|)`` over sparse mappings; 0 when either is zero."""
    if not u or not v:
        return 0.0
    if len(u) > len(v):
        u, v = v, u
    dot = sum(value * v.get(key, 0.0) for key, value in u.items())
    norm_u = math.sqrt(sum(value * value for value in u.values()))
    norm_v = math.sqrt(sum(value * value for value in v.values()))
    if norm_u == 0.0 or norm_v == 0.0:
        return 0.0
    return dot / (norm_u * norm_v)


def vectorize_query(model: TfidfModel, text: str) -> dict[int, float]:
    """Project text onto the fitted vocabulary; unseen terms are dropped."""
    counts: dict[str, int] = {}
    for term in tokenize(text):
        if term in model.vocabulary:
            counts[term] = counts.get(term, 0) + 1
    vector = {
        model.vocabulary[term]: tf * math.log(model.n_docs / model.doc_freq[term])
        for term, tf in counts.items()
    }
    return _l2_normalize(vector)


def similar_travelers(model: TfidfModel, query_skills: str, k: int) -> list[tuple[str, float]]:
    """Top-k documents by cosine to the query, ties broken by doc id."""
    if k < 1:
        raise InvalidValue("k", "must be at least 1")
    if not model.doc_vectors:
        raise UnfittedModel("model has no fitted documents")
    query = vectorize_query(model, query_skills)
    scored = [(doc_id, cosine_similarity(query, vector)) for doc_id, vector in model.doc_vectors.items()]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:k]


@dataclass(frozen=True)
class RatingsMatrix:
    """(traveler, facility) -> sentiment-derived rating in [0, 1]."""

    ratings: Mapping[tuple[str, str], float]
    _by_traveler: Mapping[str, dict[str, float]] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        by_traveler: dict[str, dict[str, float]] = {}
        for (traveler_id, facility_id), score in self.ratings.items():
            if not 0.0 <= score <= 1.0:
                raise InvalidValue(f"rating[{traveler_id},{facility_id}]", "must lie in [0, 1]")
            by_traveler.setdefault(traveler_id, {})[facility_id] = score
        object.__setattr__(self, "_by_traveler", by_traveler)

    def traveler_ratings(self, traveler_id: str) -> dict[str, float]:
        return self._by_traveler.get(traveler_id, {})

    def travelers(self) -> list[str]:
        return sorted(self._by_traveler)

    def facilities(self) -> list[str]:
        return sorted({facility_id for _, facility_id in self.ratings})


def _co_rated_similarity(a: Mapping[str, float], b: Mapping[str, float]) -> float | None:
    shared = sorted(set(a) & set(b))
    if not shared:
        return None
    return cosine_similarity({f: a[f] for f in shared}, {f: b[f] for f in shared})


def cf_predict(
    matrix: RatingsMatrix,
    traveler_id: str,
    facility_id: str,
    n_neighbors: int = 5,
    *,
    divisor: str = "count",
) -> float:
    """Predict a rating from the most similar co-raters.

    Similarity is cosine over co-rated facility vectors; the top-N similar
    travelers who rated the facility contribute ``sim * rating`` terms.
    """
    own = matrix.traveler_ratings(traveler_id)
    if not own:
        raise UnknownTraveler(traveler_id)
    candidates = []
    for other_id in matrix.travelers():
        if other_id == traveler_id:
            continue
        other = matrix.traveler_ratings(other_id)
        if facility_id not in other:
            continue
        similarity = _co_rated_similarity(own, other)
        if similarity is None:
            continue
        candidates.append((similarity, other_id, other[facility_id]))
    if not candidates:
        raise NoNeighbors(f"nobody similar rated facility {facility_id}")
    candidates.sort(key=lambda item: (-item[0], item[1]))
    top = candidates[:n_neighbors]
    weighted = sum(similarity * rating for similarity, _, rating in top)
    if divisor == "count":
        prediction = weighted / len(top)
    elif divisor == "sim_sum":
        sim_total = sum(similarity for similarity, _, _ in top)
        if sim_total == 0.0:
            raise NoNeighbors(f"similar raters of {facility_id} all have zero similarity")
        prediction = weighted / sim_total
    else:
        raise InvalidValue("divisor", "expected 'count' or 'sim_sum'")
    return min(1.0, max(0.0, prediction))


def recommend_facilities(
    matrix: RatingsMatrix,
    traveler_id: str,
    k: int = 5,
    *,
    n_neighbors: int = 5,
    divisor: str = "count",
) -> list[tuple[str, float]]:
    """Top-k unrated facilities by predicted rating, ties by facility id."""
    own = matrix.traveler_ratings(traveler_id)
    if not own:
        raise UnknownTraveler(traveler_id)
    scored = []
    for facility_id in matrix.facilities():
        if facility_id in own:
            continue
        try:
            prediction = cf_predict(matrix, traveler_id, facility_id, n_neighbors, divisor=divisor)
        except NoNeighbors:
            continue
        scored.append((facility_id, prediction))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:k]
