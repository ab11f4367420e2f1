"""Markup cleanup, name normalization, entity extraction, replication."""

from __future__ import annotations

import html as html_module
import json
import math
import re
from collections import Counter

import httpx
import pytest

from bidimatch.errors import SourceUnavailable, UnknownKind
from bidimatch.feed import (
    EntityKind,
    JsonlStore,
    Matched,
    Queued,
    RawJobRecord,
    ScrubRules,
    clean_markup,
    extract_entity,
    fetch_raw,
    load_gazetteers,
    normalize_name,
    orchestrate,
    replicate_scrub,
    trigram_cosine,
)


def reference_strip(payload: str) -> str:
    """Independent oracle: regex-based tag stripper."""
    no_scripts = re.sub(r"(?is)<(script|style)\b.*?>.*?</\1>", " ", payload)
    no_tags = re.sub(r"(?s)<[^>]+>", " ", no_scripts)
    return " ".join(html_module.unescape(no_tags).split())


def reference_trigram_cosine(a: str, b: str) -> float:
    """Independent oracle: counts padded character trigrams directly."""

    def grams(s):
        s = "##" + " ".join(s.lower().split()) + "##"
        return Counter(s[i : i + 3] for i in range(len(s) - 2))

    u, v = grams(a), grams(b)
    dot = sum(u[g] * v[g] for g in u)
    return dot / math.sqrt(sum(c * c for c in u.values()) * sum(c * c for c in v.values()))


class TestCleanMarkup:
    def test_simple_paragraph(self):
        assert clean_markup("<p>RN needed</p>") == "RN needed"

    def test_entity_decoding(self):
        assert clean_markup("Days &amp; Nights") == "Days & Nights"

    def test_script_and_style_dropped(self):
        payload = "<style>p{color:red}</style><p>ICU</p><script>alert(1)</script>"
        assert clean_markup(payload) == "ICU"

    def test_nested_lists_match_reference_stripper(self):
        payload = (
            "<div><h1>Travel RN &ndash; ICU</h1><ul><li>12 hour shifts</li>"
            "<li>Benefits:<ul><li>Housing</li><li>401k &amp; insurance</li></ul></li></ul>"
            "<script>track();</script><p>Apply <b>now</b>!</p></div>"
        )
        assert clean_markup(payload) == reference_strip(payload)

    def test_plain_text_passthrough(self):
        assert clean_markup("just words  with   spaces") == "just words with spaces"


class TestNameNormalization:
    def test_exact_match_similarity_one(self):
        outcome = normalize_name("Emergency Room", {"Emergency Room", "Main Campus"})
        assert isinstance(outcome, Matched)
        assert outcome.name == "Emergency Room"
        assert outcome.similarity == pytest.approx(1.0)

    def test_misspelling_matches_above_threshold(self):
        expected = reference_trigram_cosine("Emergancy Room", "Emergency Room")
        assert expected >= 0.70
        outcome = normalize_name("Emergancy Room", {"Emergency Room"})
        assert isinstance(outcome, Matched)
        assert outcome.similarity == pytest.approx(expected, abs=1e-12)

    def test_unrelated_name_queued(self):
        store: list[dict] = []

        class ListQueue:
            def append(self, record):
                store.append(record)

        outcome = normalize_name("XYZ Clinic", {"Emergency Room", "General Hospital"}, review_queue=ListQueue(), now=9.0)
        assert isinstance(outcome, Queued)
        assert outcome.entry.similarity < 0.70
        assert store and store[0]["candidate_name"] == "XYZ Clinic"
        assert store[0]["resolved"] is False

    def test_threshold_exactness(self):
        # 10 distinct trigrams each, 7 shared -> cosine exactly 0.70
        a, b = "abcdefgh", "abcdefgq"
        assert trigram_cosine(a, b) == 0.70
        assert isinstance(normalize_name(a, {b}), Matched)
        # one extra trigram pushes it below the threshold
        below = normalize_name("abcdefghi", {"abcdefgq"})
        assert isinstance(below, Queued)
        assert below.entry.similarity < 0.70

    def test_agreement_with_reference_oracle(self):
        names = ["Mercy General", "Mercy Genral", "St. Luke Medical", "Lakeside Clinic", "Mercy Generall Hospital"]
        canon = {"Mercy General", "St. Luke Medical Center"}
        for name in names:
            best = max(canon, key=lambda c: reference_trigram_cosine(name, c))
            expected_sim = reference_trigram_cosine(name, best)
            outcome = normalize_name(name, canon)
            if expected_sim >= 0.70:
                assert isinstance(outcome, Matched)
                assert outcome.similarity == pytest.approx(expected_sim, abs=1e-12)
            else:
                assert isinstance(outcome, Queued)


@pytest.fixture(scope="module")
def gazetteers():
    return load_gazetteers()


class TestEntityExtraction:
    def test_first_unit_wins(self, gazetteers):
        assert extract_entity("OR and ICU experience required", EntityKind.UNIT_TYPE, gazetteers) == "OR"

    def test_lowercase_or_is_not_a_unit(self, gazetteers):
        assert extract_entity("day shift or evenings available", EntityKind.UNIT_TYPE, gazetteers) is None

    def test_shift_length_and_name(self, gazetteers):
        text = "12 hour nights at a busy hospital"
        assert extract_entity(text, EntityKind.SHIFT_LENGTH, gazetteers) == "12"
        assert extract_entity(text, EntityKind.SHIFT_NAME, gazetteers) == "Nights"

    def test_shift_pattern_nxh(self, gazetteers):
        assert extract_entity("schedule is 3x12 weekly", EntityKind.SHIFT_LENGTH, gazetteers) == "12"

    def test_synonym_maps_to_canonical(self, gazetteers):
        assert extract_entity("intensive care unit opening", EntityKind.UNIT_TYPE, gazetteers) == "ICU"
        assert extract_entity("skilled nursing facility in town", EntityKind.CARE_SETTING, gazetteers) == "SNF"

    def test_no_entities(self, gazetteers):
        assert extract_entity("general clerical duties", EntityKind.UNIT_TYPE, gazetteers) is None

    def test_unknown_kind(self, gazetteers):
        with pytest.raises(UnknownKind):
            extract_entity("text", "salary_band", gazetteers)

    def test_gazetteer_iteration_order_is_irrelevant(self, gazetteers):
        text = "Telemetry then ICU then OR duties"
        forward = gazetteers["unit_type"]
        backward = dict(reversed(list(forward.items())))
        assert (
            extract_entity(text, EntityKind.UNIT_TYPE, {"unit_type": forward})
            == extract_entity(text, EntityKind.UNIT_TYPE, {"unit_type": backward})
            == "Telemetry"
        )


class TestFetchRaw:
    def test_fixture_file(self, tmp_path):
        fixture = tmp_path / "ads.json"
        fixture.write_text(
            json.dumps(
                [{"external_identifier": f"X{i}", "payload": "<p>ad</p>", "facility_name": "General"} for i in range(10)]
            )
        )
        store = JsonlStore(tmp_path / "raw.jsonl")
        records = fetch_raw(fixture, store, now=1.0)
        assert len(records) == 10
        assert len(store.read_all()) == 10

    def test_duplicate_external_ids_both_stored(self, tmp_path):
        fixture = tmp_path / "ads.jsonl"
        fixture.write_text('{"external_identifier": "X1", "payload": "a"}\n{"external_identifier": "X1", "payload": "b"}\n')
        store = JsonlStore(tmp_path / "raw.jsonl")
        records = fetch_raw(fixture, store, now=1.0)
        assert len(records) == 2
        assert len(store.read_all()) == 2

    def test_unreachable_url_retries_three_times(self, tmp_path):
        attempts = []

        def handler(request):
            attempts.append(request.url)
            raise httpx.ConnectError("refused")

        client = httpx.Client(transport=httpx.MockTransport(handler))
        store = JsonlStore(tmp_path / "raw.jsonl")
        with pytest.raises(SourceUnavailable):
            fetch_raw("http://feeds.example/jobs", store, client=client, sleep=lambda _s: None)
        assert len(attempts) == 3
        assert store.read_all() == []

    def test_missing_fixture(self, tmp_path):
        with pytest.raises(SourceUnavailable):
            fetch_raw(tmp_path / "nope.json", JsonlStore(tmp_path / "raw.jsonl"))


class TestOrchestrate:
    CANON = ["General Hospital", "Mercy Medical Center"]

    def test_fully_mappable_ad(self, tmp_path):
        gazetteers = load_gazetteers()
        raw = RawJobRecord("X1", "fixture", "<p>ICU nurse, 12 hour nights at our acute care hospital.</p>", 1.0, "General Hospital")
        jobfeed = JsonlStore(tmp_path / "jobfeed.jsonl")
        review = JsonlStore(tmp_path / "review.jsonl")
        row = orchestrate(raw, self.CANON, gazetteers, jobfeed_store=jobfeed, review_store=review, now=2.0)
        assert row.mapping_complete is True
        assert row.facility_name == "General Hospital"
        assert row.unit_type == "ICU"
        assert row.shift_length == "12"
        assert row.shift_name == "Nights"
        assert row.care_setting == "Hospital"
        assert len(jobfeed.read_all()) == 1
        assert review.read_all() == []

    def test_unknown_facility_flagged_not_dropped(self, tmp_path):
        gazetteers = load_gazetteers()
        raw = RawJobRecord("X2", "fixture", "<p>ICU nurse, 12 hour nights, acute care.</p>", 1.0, "Zzyzx Wellness Hut")
        jobfeed = JsonlStore(tmp_path / "jobfeed.jsonl")
        review = JsonlStore(tmp_path / "review.jsonl")
        row = orchestrate(raw, self.CANON, gazetteers, jobfeed_store=jobfeed, review_store=review, now=2.0)
        assert row.mapping_complete is False
        assert row.facility_name is None
        assert len(jobfeed.read_all()) == 1
        queue = review.read_all()
        assert len(queue) == 1 and queue[0]["candidate_name"] == "Zzyzx Wellness Hut"

    def test_missing_entities_flagged(self):
        gazetteers = load_gazetteers()
        raw = RawJobRecord("X3", "fixture", "<p>clerical duties</p>", 1.0, "General Hospital")
        row = orchestrate(raw, self.CANON, gazetteers)
        assert row.mapping_complete is False
        assert row.unit_type is None

    def test_batch_totality_and_order_independence(self):
        gazetteers = load_gazetteers()
        ads = [
            RawJobRecord(f"X{i}", "fix", f"<p>{'ICU' if i % 2 else 'clerical'} 12 hour nights hospital</p>", 1.0, "General Hospital")
            for i in range(50)
        ]
        rows = [orchestrate(ad, self.CANON, gazetteers, now=1.0) for ad in ads]
        shuffled = [orchestrate(ad, self.CANON, gazetteers, now=1.0) for ad in reversed(ads)]
        assert len(rows) == 50
        assert {r.external_identifier: r for r in rows} == {r.external_identifier: r for r in shuffled}


class TestReplicateScrub:
    def make_src(self, tmp_path, n=50):
        src = JsonlStore(tmp_path / "src.jsonl")
        for i in range(n):
            src.append(
                {
                    "external_identifier": f"X{i}",
                    "facility_name": f"Hospital {i % 5}",
                    "recruiter_name": "Pat Smith" if i % 2 else "Alex Chen",
                    "description_text": f"ad {i}",
                }
            )
        return src

    def test_copy_and_scrub(self, tmp_path):
        src = self.make_src(tmp_path)
        dst = JsonlStore(tmp_path / "dst.jsonl")
        rules = ScrubRules(("facility_name", "recruiter_name"), key="sekrit")
        assert replicate_scrub(src, dst, rules) == 50
        content = (tmp_path / "dst.jsonl").read_text()
        for needle in ("Pat Smith", "Alex Chen", "Hospital 0"):
            assert needle not in content
        assert len(dst.read_all()) == 50

    def test_second_run_copies_nothing(self, tmp_path):
        src = self.make_src(tmp_path)
        dst = JsonlStore(tmp_path / "dst.jsonl")
        rules = ScrubRules(("facility_name", "recruiter_name"), key="sekrit")
        replicate_scrub(src, dst, rules)
        assert replicate_scrub(src, dst, rules) == 0

    def test_changed_row_recopied(self, tmp_path):
        src = self.make_src(tmp_path, n=3)
        dst = JsonlStore(tmp_path / "dst.jsonl")
        rules = ScrubRules(("facility_name",), key="sekrit")
        replicate_scrub(src, dst, rules)
        src.append({"external_identifier": "X1", "facility_name": "Hospital 9", "description_text": "updated"})
        assert replicate_scrub(src, dst, rules) == 1

    def test_same_value_same_pseudonym(self, tmp_path):
        rules = ScrubRules(("recruiter_name",), key="sekrit")
        a = rules.apply({"recruiter_name": "Pat Smith"})
        b = rules.apply({"recruiter_name": "Pat Smith"})
        assert a["recruiter_name"] == b["recruiter_name"]
        assert a["recruiter_name"].startswith("anon-")

    def test_joins_survive(self, tmp_path):
        src = self.make_src(tmp_path)
        dst = JsonlStore(tmp_path / "dst.jsonl")
        rules = ScrubRules(("recruiter_name",), key="sekrit")
        replicate_scrub(src, dst, rules)
        names = {row["recruiter_name"] for row in dst.read_all()}
        assert len(names) == 2  # two recruiters stay two pseudonyms
