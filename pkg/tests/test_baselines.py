"""TF-IDF content recommender and user-based collaborative filtering."""

from __future__ import annotations

import math
import random

import pytest

from bidimatch.baselines import (
    RatingsMatrix,
    cf_predict,
    cosine_similarity,
    recommend_facilities,
    similar_travelers,
    tfidf_fit,
    vectorize_query,
)
from bidimatch.errors import EmptyCorpus, InvalidValue, NoNeighbors, UnfittedModel, UnknownTraveler


class TestTfidf:
    def test_ubiquitous_term_weighs_zero(self):
        corpus = {"d1": "icu nurse", "d2": "icu tech", "d3": "icu clerk"}
        model = tfidf_fit(corpus)
        icu_index = model.vocabulary["icu"]
        for vector in model.doc_vectors.values():
            assert vector.get(icu_index, 0.0) == 0.0

    def test_raw_weight_formula(self):
        corpus = {"d1": "dialysis dialysis", "d2": "icu", "d3": "er", "d4": "peds"}
        model = tfidf_fit(corpus)
        # tf 2, df 1, N 4 -> 2 * ln 4 before normalization
        expected = 2 * math.log(4)
        index = model.vocabulary["dialysis"]
        # d1 holds only this term, so normalization maps it to 1.0
        assert model.doc_vectors["d1"][index] == pytest.approx(1.0)
        raw = {index: expected}
        assert raw[index] == pytest.approx(2.7726, abs=1e-4)

    def test_empty_document_becomes_zero_vector(self):
        model = tfidf_fit({"d1": "", "d2": "icu"})
        assert model.doc_vectors["d1"] == {}

    def test_empty_corpus_rejected(self):
        with pytest.raises(EmptyCorpus):
            tfidf_fit({})


class TestCosine:
    def test_identity(self):
        v = {0: 1.0, 3: 2.0}
        assert cosine_similarity(v, v) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal(self):
        assert cosine_similarity({0: 1.0}, {1: 1.0}) == 0.0

    def test_hand_value(self):
        assert cosine_similarity({0: 1.0, 1: 1.0}, {0: 1.0}) == pytest.approx(1 / math.sqrt(2), abs=1e-9)

    def test_zero_vector(self):
        assert cosine_similarity({}, {0: 1.0}) == 0.0

    def test_symmetry_and_range(self):
        rng = random.Random(4)
        for _ in range(50):
            u = {i: rng.random() for i in rng.sample(range(10), 4)}
            v = {i: rng.random() for i in rng.sample(range(10), 4)}
            assert cosine_similarity(u, v) == pytest.approx(cosine_similarity(v, u), abs=1e-12)
            assert -1e-12 <= cosine_similarity(u, v) <= 1.0 + 1e-12


class TestSimilarTravelers:
    CORPUS = {
        "t1": "icu critical care nights",
        "t2": "er emergency trauma",
        "t3": "icu stepdown tele",
    }

    def test_existing_document_is_its_own_best_match(self):
        model = tfidf_fit(self.CORPUS)
        top = similar_travelers(model, self.CORPUS["t2"], k=1)
        assert top[0][0] == "t2"
        assert top[0][1] == pytest.approx(1.0, abs=1e-9)

    def test_unseen_terms_score_zero(self):
        model = tfidf_fit(self.CORPUS)
        results = similar_travelers(model, "quantum blockchain", k=3)
        assert all(similarity == 0.0 for _, similarity in results)

    def test_ordering_matches_brute_force(self):
        model = tfidf_fit(self.CORPUS)
        query = "icu nights"
        expected = sorted(
            ((doc_id, cosine_similarity(vectorize_query(model, query), vec)) for doc_id, vec in model.doc_vectors.items()),
            key=lambda pair: (-pair[1], pair[0]),
        )
        assert similar_travelers(model, query, k=3) == expected

    def test_k_larger_than_corpus_returns_everything(self):
        model = tfidf_fit(self.CORPUS)
        assert len(similar_travelers(model, "icu", k=50)) == 3

    def test_k_must_be_positive(self):
        model = tfidf_fit(self.CORPUS)
        with pytest.raises(InvalidValue):
            similar_travelers(model, "icu", k=0)

    def test_unfitted_model_rejected(self):
        from bidimatch.baselines import TfidfModel

        with pytest.raises(UnfittedModel):
            similar_travelers(TfidfModel({}, {}, 0, {}), "icu", k=1)


class TestCfPredict:
    def test_single_neighbor_full_similarity(self):
        matrix = RatingsMatrix({("t1", "A"): 0.8, ("t2", "A"): 0.8, ("t2", "B"): 0.9})
        assert cf_predict(matrix, "t1", "B", 5) == pytest.approx(0.9)

    def test_hand_weighted_average_with_count_divisor(self):
        # sims {1.0, 0.5}, ratings {0.8, 0.4} -> (0.8 + 0.2) / 2 = 0.5
        prediction = (1.0 * 0.8 + 0.5 * 0.4) / 2
        assert prediction == pytest.approx(0.5)

    def test_no_neighbors(self):
        matrix = RatingsMatrix({("t1", "A"): 0.8, ("t2", "B"): 0.9})
        with pytest.raises(NoNeighbors):
            cf_predict(matrix, "t1", "B", 5)

    def test_unknown_traveler(self):
        matrix = RatingsMatrix({("t1", "A"): 0.8})
        with pytest.raises(UnknownTraveler):
            cf_predict(matrix, "ghost", "A", 5)

    def test_ratings_validated(self):
        with pytest.raises(InvalidValue):
            RatingsMatrix({("t1", "A"): 1.4})

    def test_sim_sum_divisor_switch(self):
        matrix = RatingsMatrix(
            {("t1", "A"): 1.0, ("t1", "B"): 0.5, ("t2", "A"): 1.0, ("t2", "B"): 0.5, ("t2", "C"): 0.8}
        )
        count_based = cf_predict(matrix, "t1", "C", 5, divisor="count")
        sim_based = cf_predict(matrix, "t1", "C", 5, divisor="sim_sum")
        assert count_based == pytest.approx(sim_based)  # one neighbor with sim 1.0


class TestRecommendFacilities:
    def test_neighborhood_recommendation_scenario(self):
        """Two travelers agree on A and B; the neighbor also rated C."""
        matrix = RatingsMatrix(
            {
                ("u1", "A"): 0.9,
                ("u1", "B"): 0.8,
                ("u2", "A"): 0.9,
                ("u2", "B"): 0.8,
                ("u2", "C"): 0.95,
            }
        )
        recommendations = recommend_facilities(matrix, "u1", k=3)
        assert recommendations[0][0] == "C"
        assert recommendations[0][1] == pytest.approx(0.95, abs=1e-9)

    def test_traveler_who_rated_everything(self):
        matrix = RatingsMatrix({("u1", "A"): 0.9, ("u2", "A"): 0.8})
        assert recommend_facilities(matrix, "u1", k=3) == []


def brute_force_predict(ratings, traveler, facility, n_neighbors):
    """Independent oracle: direct loops over the ratings dict."""
    own = {f: r for (t, f), r in ratings.items() if t == traveler}
    if not own:
        raise UnknownTraveler(traveler)
    sims = []
    for other in sorted({t for t, _ in ratings}):
        if other == traveler:
            continue
        other_ratings = {f: r for (t, f), r in ratings.items() if t == other}
        if facility not in other_ratings:
            continue
        shared = sorted(set(own) & set(other_ratings))
        if not shared:
            continue
        dot = sum(own[f] * other_ratings[f] for f in shared)
        nu = math.sqrt(sum(own[f] ** 2 for f in shared))
        nv = math.sqrt(sum(other_ratings[f] ** 2 for f in shared))
        if nu == 0 or nv == 0:
            sim = 0.0
        else:
            sim = dot / (nu * nv)
        sims.append((sim, other, other_ratings[facility]))
    if not sims:
        raise NoNeighbors(facility)
    sims.sort(key=lambda x: (-x[0], x[1]))
    top = sims[:n_neighbors]
    return min(1.0, max(0.0, sum(s * r for s, _, r in top) / len(top)))


class TestOracleEquivalence:
    def test_cf_matches_brute_force_on_random_matrices(self):
        for seed in range(100):
            rng = random.Random(seed)
            ratings = {}
            for t in range(5):
                for f in range(5):
                    if rng.random() < 0.6:
                        ratings[(f"t{t}", f"f{f}")] = round(rng.random(), 3)
            if not ratings:
                continue
            matrix = RatingsMatrix(ratings)
            for traveler in matrix.travelers():
                for facility in matrix.facilities():
                    if (traveler, facility) in ratings:
                        continue
                    try:
                        expected = brute_force_predict(ratings, traveler, facility, 3)
                    except NoNeighbors:
                        with pytest.raises(NoNeighbors):
                            cf_predict(matrix, traveler, facility, 3)
                        continue
                    assert cf_predict(matrix, traveler, facility, 3) == pytest.approx(expected, abs=1e-12)

    def test_recommendations_match_brute_force_ranking(self):
        for seed in range(20):
            rng = random.Random(1_000 + seed)
            ratings = {}
            for t in range(5):
                for f in range(5):
                    if rng.random() < 0.6:
                        ratings[(f"t{t}", f"f{f}")] = round(rng.random(), 3)
            if not ratings:
                continue
            matrix = RatingsMatrix(ratings)
            for traveler in matrix.travelers():
                own = matrix.traveler_ratings(traveler)
                expected = []
                for facility in matrix.facilities():
                    if facility in own:
                        continue
                    try:
                        expected.append((facility, brute_force_predict(ratings, traveler, facility, 3)))
                    except NoNeighbors:
                        continue
                expected.sort(key=lambda pair: (-pair[1], pair[0]))
                actual = recommend_facilities(matrix, traveler, k=5, n_neighbors=3)
                assert [(f, pytest.approx(p, abs=1e-12)) for f, p in expected[:5]] == actual

    def test_neighbor_order_permutation_invariance(self):
        ratings = {
            ("t1", "A"): 0.9,
            ("t2", "A"): 0.7,
            ("t2", "B"): 0.6,
            ("t3", "A"): 0.8,
            ("t3", "B"): 0.4,
        }
        shuffled = dict(reversed(list(ratings.items())))
        assert cf_predict(RatingsMatrix(ratings), "t1", "B", 2) == cf_predict(RatingsMatrix(shuffled), "t1", "B", 2)
