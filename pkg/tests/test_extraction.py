from __future__ import annotations

import json

import pytest

from tonecap.errors import DuplicateProposal, ExtractionError, ParseError, SchemaError
from tonecap.extraction import (
    ExtractionConfig,
    append_proposal,
    extract_informativeness,
    extract_personality,
    extract_structural_flags,
    extract_tone_profile,
    extract_writing_style,
    load_proposals,
    propose_style_candidate,
)
from tonecap.mock import MockProvider
from tonecap.schema import validate_profile

CFG = ExtractionConfig()

CAPTION = "cant believe that car nearly hit the cyclist conversational conversational conversational #CyclistLife 😱"


class TestWritingStyle:
    def test_fixture_echo_zero_fills(self, summary, inventory):
        provider = MockProvider()
        provider.add_fixture_containing(CAPTION, json.dumps({"Conversational": 0.75, "Factual": 0.1}))
        styles = extract_writing_style(CAPTION, summary, CFG, provider)
        assert styles["Conversational"] == 0.75
        assert styles["Factual"] == 0.1
        assert set(styles) == set(inventory.writing_styles)
        assert styles["Poetic"] == 0.0

    def test_non_json_twice_raises(self, summary):
        provider = MockProvider()
        provider.add_fixture_containing(CAPTION, "definitely not json")
        with pytest.raises(ParseError):
            extract_writing_style(CAPTION, summary, CFG, provider)

    def test_out_of_range_intensity_raises(self, summary):
        provider = MockProvider()
        provider.add_fixture_containing(CAPTION, json.dumps({"Conversational": 1.4}))
        with pytest.raises(ParseError):
            extract_writing_style(CAPTION, summary, CFG, provider)

    def test_semantic_mock_counts_tokens(self, summary):
        styles = extract_writing_style(CAPTION, summary, CFG, MockProvider())
        assert styles["Conversational"] == 0.75


class TestPersonality:
    def test_fixture_sparse_map(self, summary):
        provider = MockProvider()
        provider.add_fixture_containing(CAPTION, json.dumps({"Anxious": 0.8, "Emotional": 0.5}))
        out = extract_personality(CAPTION, summary, CFG, provider)
        assert out == {"Anxious": 0.8, "Emotional": 0.5}

    def test_unknown_trait_raises(self, summary):
        provider = MockProvider()
        provider.add_fixture_containing(CAPTION, json.dumps({"Zorblax": 0.5}))
        with pytest.raises(ParseError):
            extract_personality(CAPTION, summary, CFG, provider)

    def test_empty_shortlist_is_valid(self, summary):
        provider = MockProvider()
        provider.add_fixture_containing(CAPTION, "{}")
        assert extract_personality(CAPTION, summary, CFG, provider) == {}


class TestInformativeness:
    def test_identity_caption(self, summary):
        assert extract_informativeness(summary, summary, CFG, MockProvider()) == 1.0

    def test_no_facts_low(self, summary):
        value = extract_informativeness("wow just wow", summary, CFG, MockProvider())
        assert 0.0 <= value <= 0.2

    def test_out_of_range_raises(self, summary):
        provider = MockProvider()
        provider.add_fixture_containing(CAPTION, json.dumps({"informativeness": 1.2}))
        with pytest.raises(ParseError):
            extract_informativeness(CAPTION, summary, CFG, provider)


class TestStructuralFlags:
    def test_location_and_date(self):
        flags = extract_structural_flags("crazy scenes in London today everyone", CFG, MockProvider())
        assert flags == {"location": True, "date_time": True, "first_person": False}

    def test_first_person(self):
        flags = extract_structural_flags("I braked hard", CFG, MockProvider())
        assert flags["first_person"] is True

    def test_all_absent(self):
        flags = extract_structural_flags("car stops at junction", CFG, MockProvider())
        assert flags == {"location": False, "date_time": False, "first_person": False}


class TestFullProfile:
    def test_composed_profile(self, summary, inventory):
        profile = extract_tone_profile(CAPTION, summary, CFG, MockProvider())
        validate_profile(profile, inventory)
        assert profile.role == "extracted"
        assert profile.structural.hashtags is True
        assert profile.structural.emojis is True
        assert profile.structural.user_mentions is False
        assert profile.structural.word_count == 13
        assert profile.writing_style["Conversational"] == 0.75

    def test_fail_fast_tags_step(self, summary):
        provider = MockProvider()
        calls = []
        original = provider.chat

        def spy(request):
            calls.append(request.prompt_text().split("\n", 1)[0])
            return original(request)

        provider.chat = spy  # type: ignore[method-assign]
        provider.add_fixture_containing("shortlist personality traits", "broken {")
        with pytest.raises(ExtractionError) as err:
            extract_tone_profile(CAPTION, summary, CFG, provider)
        assert err.value.step == 2
        # steps 3-4 never attempted: style (x1) + personality (x2 with repair)
        heads = [h for h in calls if h.startswith("Task:")]
        assert not any("factual content" in h or "detect location" in h for h in heads)

    def test_deterministic(self, summary):
        a = extract_tone_profile(CAPTION, summary, CFG, MockProvider())
        b = extract_tone_profile(CAPTION, summary, CFG, MockProvider())
        assert a == b


class TestStyleProposal:
    def test_proposes_when_all_low(self, summary):
        proposal = propose_style_candidate(
            "zzz unusual caption", summary, {"Factual": 0.05, "Poetic": 0.1}, CFG, MockProvider()
        )
        assert proposal.status == "pending"
        assert proposal.proposed_style
        assert proposal.caption_id

    def test_fixture_forced_name(self, summary):
        provider = MockProvider()
        provider.add_fixture_containing("zzz unusual caption", json.dumps({"style": "Alarmist", "rationale": "r"}))
        proposal = propose_style_candidate("zzz unusual caption", summary, {}, CFG, provider)
        assert proposal.proposed_style == "Alarmist"

    def test_refuses_when_any_style_strong(self, summary):
        with pytest.raises(SchemaError):
            propose_style_candidate("cap", summary, {"Factual": 0.6}, CFG, MockProvider())

    def test_duplicate_proposal_rejected(self, summary):
        provider = MockProvider()
        provider.add_fixture_containing("cap", json.dumps({"style": "factual", "rationale": "r"}))
        with pytest.raises(DuplicateProposal):
            propose_style_candidate("cap", summary, {}, CFG, provider)

    def test_queue_round_trip(self, tmp_path, summary):
        queue = tmp_path / "queue.jsonl"
        p1 = propose_style_candidate("zzz one", summary, {}, CFG, MockProvider())
        p2 = propose_style_candidate("zzz two", summary, {}, CFG, MockProvider())
        append_proposal(queue, p1)
        append_proposal(queue, p2)
        loaded = load_proposals(queue)
        assert [p.caption_id for p in loaded] == [p1.caption_id, p2.caption_id]
