from __future__ import annotations

import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tonecap.errors import DegenerateTarget, ParseError, RangeError, SchemaError
from tonecap.extraction import ExtractionConfig
from tonecap.metrics import (
    JudgeConfig,
    ScoreReport,
    assemble_report,
    factual_consistency,
    judge_personality,
    judge_style,
    score_caption,
    structural_alignment,
    verify_report,
)
from tonecap.mock import MockProvider, compose_mock_caption
from tonecap.schema import STRUCTURAL_ATTRS, StructuralControls, ToneProfile, profile_to_wire

JCFG = JudgeConfig()


def _controls(info=0.4, wc=17, **flags) -> StructuralControls:
    return StructuralControls(informativeness=info, word_count=wc, **flags)


class TestStructuralAlignment:
    def test_perfect_match(self):
        t = _controls(hashtags=True, first_person=True)
        sas, e_i, e_len, errs = structural_alignment(t, t)
        assert sas == 1.0 and e_i == 0.0 and e_len == 0.0
        assert sum(errs.values()) == 0

    def test_hand_computed_example(self):
        # e_i = 0.1, e_len = 0.2, exactly one boolean mismatch
        target = _controls(info=0.5, wc=10, hashtags=True)
        measured = _controls(info=0.6, wc=12, hashtags=False)
        sas, e_i, e_len, errs = structural_alignment(target, measured)
        assert abs(e_i - 0.1) < 1e-12
        assert abs(e_len - 0.2) < 1e-12
        assert sum(errs.values()) == 1
        assert abs(sas - 0.8375) < 1e-12

    def test_word_count_relative_error(self):
        target = _controls(wc=17)
        measured = _controls(wc=20)
        _, _, e_len, _ = structural_alignment(target, measured)
        assert abs(e_len - 3 / 17) < 1e-12

    def test_e_len_clamped(self):
        target = _controls(wc=5)
        measured = _controls(wc=500)
        sas, _, e_len, _ = structural_alignment(target, measured)
        assert e_len == 1.0
        assert 0.0 <= sas <= 1.0

    def test_degenerate_target_rejected(self):
        good = _controls()
        with pytest.raises(RangeError):
            _controls(wc=0)
        bad = object.__new__(StructuralControls)
        object.__setattr__(bad, "informativeness", 0.4)
        object.__setattr__(bad, "word_count", 0)
        for a in STRUCTURAL_ATTRS:
            object.__setattr__(bad, a, False)
        with pytest.raises(DegenerateTarget):
            structural_alignment(bad, good)

    def test_boolean_symmetry(self):
        rng = random.Random(3)
        for _ in range(50):
            a = _controls(**{k: rng.random() < 0.5 for k in STRUCTURAL_ATTRS})
            b = _controls(**{k: rng.random() < 0.5 for k in STRUCTURAL_ATTRS})
            _, _, _, e_ab = structural_alignment(a, b)
            _, _, _, e_ba = structural_alignment(b, a)
            assert e_ab == e_ba

    @given(
        st.floats(min_value=0, max_value=1),
        st.floats(min_value=0, max_value=1),
        st.integers(min_value=1, max_value=300),
        st.integers(min_value=0, max_value=300),
    )
    def test_sas_always_in_unit_interval(self, ti, mi, twc, mwc):
        sas, *_ = structural_alignment(_controls(info=ti, wc=twc), _controls(info=mi, wc=max(1, mwc)))
        assert 0.0 <= sas <= 1.0

    def test_monotone_in_errors(self):
        base_t = _controls(info=0.5, wc=10)
        base_m = _controls(info=0.5, wc=10)
        sas0, *_ = structural_alignment(base_t, base_m)
        sas1, *_ = structural_alignment(base_t, _controls(info=0.7, wc=10))
        sas2, *_ = structural_alignment(base_t, _controls(info=0.7, wc=14))
        sas3, *_ = structural_alignment(base_t, _controls(info=0.7, wc=14, emojis=True))
        assert sas0 >= sas1 >= sas2 >= sas3


class TestJudges:
    def test_identity_scores_one(self):
        target = {"Anxious": 0.8, "Emotional": 0.5}
        assert judge_personality(target, dict(target), JCFG, MockProvider()) == 1.0

    def test_disjoint_scores_zero(self):
        assert judge_personality({"Anxious": 1.0}, {"Calm": 1.0}, JCFG, MockProvider()) == 0.0

    def test_out_of_range_score_raises(self):
        provider = MockProvider()
        provider.add_fixture_containing("judge how well the extracted personality", json.dumps({"score": 1.3}))
        with pytest.raises(ParseError):
            judge_personality({"Anxious": 1.0}, {}, JCFG, provider)

    def test_style_judge_mirrors(self):
        target = {"Advisory": 0.6}
        assert judge_style(target, dict(target), JCFG, MockProvider()) == 1.0
        assert judge_style({"Advisory": 1.0}, {"Poetic": 1.0}, JCFG, MockProvider()) == 0.0

    def test_judge_temperature_pinned(self):
        with pytest.raises(RangeError):
            JudgeConfig(temperature=0.2)


class TestFactualConsistency:
    def test_identity_scores_one(self, summary):
        assert factual_consistency(summary, summary, JCFG, MockProvider()) == 1.0

    def test_contradiction_low(self):
        summary = "The car hit the cyclist at the crossing."
        caption = "Relax, the car missed the cyclist entirely."
        assert factual_consistency(caption, summary, JCFG, MockProvider()) <= 0.2

    def test_empty_summary_rejected(self):
        with pytest.raises(SchemaError):
            factual_consistency("caption", "   ", JCFG, MockProvider())


class TestAggregation:
    def test_forced_values(self):
        report = assemble_report(
            s_p=0.7, s_w=0.7, e_i=0.0, e_len=0.0,
            attr_errors={a: 0 for a in STRUCTURAL_ATTRS}, sas=0.9, fc=0.5,
        )
        assert abs(report.nas - 0.7) < 1e-12
        assert abs(report.tas - 0.8) < 1e-12
        assert abs(report.overall - 0.65) < 1e-12

    def test_partial_narrative_uses_present_components(self):
        report = assemble_report(
            s_p=None, s_w=0.6, e_i=0.0, e_len=0.0,
            attr_errors={a: 0 for a in STRUCTURAL_ATTRS}, sas=1.0, fc=1.0,
        )
        assert report.nas == 0.6
        verify_report(report)

    def test_no_components_rejected(self):
        with pytest.raises(SchemaError):
            assemble_report(s_p=None, s_w=None, e_i=0, e_len=0,
                            attr_errors={a: 0 for a in STRUCTURAL_ATTRS}, sas=1.0, fc=1.0)

    def test_report_round_trip(self):
        report = assemble_report(
            s_p=0.25, s_w=0.5, e_i=0.125, e_len=0.25,
            attr_errors={a: int(a == "emojis") for a in STRUCTURAL_ATTRS}, sas=0.828125, fc=0.75,
        )
        again = ScoreReport.from_dict(json.loads(json.dumps(report.to_dict())))
        assert again == report


class TestScoreCaption:
    def test_perfect_match_scenario(self, summary, sample_target, bundle):
        caption = compose_mock_caption(summary, profile_to_wire(sample_target))
        scored = score_caption(
            caption, summary, sample_target,
            extraction_cfg=ExtractionConfig(), judge_cfg=JCFG, providers=bundle,
        )
        verify_report(scored.report)
        assert scored.report.fc == 1.0
        assert abs(scored.report.overall - (scored.report.tas + 1.0) / 2) < 1e-12

    def test_identity_against_own_extraction(self, summary, bundle):
        caption = "cant believe that gravel truly conversational conversational #RoadWatch 🚨"
        first = score_caption(
            caption, summary,
            score_caption(
                caption, summary,
                _dummy_target(), extraction_cfg=ExtractionConfig(), judge_cfg=JCFG, providers=bundle,
            ).extracted.with_role("target"),
            extraction_cfg=ExtractionConfig(), judge_cfg=JCFG, providers=bundle,
        )
        assert first.report.tas == 1.0

    def test_requires_target_role(self, summary, bundle, sample_target):
        with pytest.raises(SchemaError):
            score_caption(
                "cap", summary, sample_target.with_role("extracted"),
                extraction_cfg=ExtractionConfig(), judge_cfg=JCFG, providers=bundle,
            )

    def test_deterministic(self, summary, sample_target, bundle):
        kwargs = dict(extraction_cfg=ExtractionConfig(), judge_cfg=JCFG, providers=bundle)
        caption = compose_mock_caption(summary, profile_to_wire(sample_target))
        a = score_caption(caption, summary, sample_target, **kwargs)
        b = score_caption(caption, summary, sample_target, **kwargs)
        assert a.report == b.report
        assert a.extracted == b.extracted


def _dummy_target():
    return ToneProfile(personality={}, writing_style={}, structural=_controls(), role="target")
