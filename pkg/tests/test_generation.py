from __future__ import annotations

import json

import pytest

from tonecap.errors import AllCandidatesFailed, SchemaError, TemplateError
from tonecap.generation import (
    MODES,
    GenerationConfig,
    generate_tone_caption,
    render_stage_prompt,
    stage1_generate,
    stage2_refine,
    stage_plan,
)
from tonecap.mock import MockProvider, mock_bundle
from tonecap.providers import ProviderBundle
from tonecap.schema import profile_to_json


def _bundle_with(provider: MockProvider) -> ProviderBundle:
    return ProviderBundle(generation=provider, extraction=provider, judge=provider, embedding=provider)


class TestRenderPrompt:
    def test_stage1_contains_spec_block(self, summary, sample_target):
        prompt = render_stage_prompt(1, summary, sample_target)
        spec = profile_to_json(sample_target, include=("style", "structural"))
        assert spec in prompt
        assert summary in prompt
        assert "Personality" not in prompt.split("Tone spec")[1]

    def test_stage2_requires_prior(self, summary, sample_target):
        with pytest.raises(SchemaError):
            render_stage_prompt(2, summary, sample_target)

    def test_stage2_serializes_full_spec_and_prior(self, summary, sample_target):
        prompt = render_stage_prompt(2, summary, sample_target, prior_best="draft text")
        assert "draft text" in prompt
        assert profile_to_json(sample_target) in prompt

    def test_template_typo_raises(self, tmp_path, summary, sample_target):
        bad_dir = tmp_path / "templates"
        bad_dir.mkdir()
        (bad_dir / "stage_infuse.txt").write_text("Task: write one social-media caption\n{sumary}\n{spec}")
        with pytest.raises(TemplateError):
            render_stage_prompt(1, summary, sample_target, template_dir=str(bad_dir))

    def test_template_missing_required_raises(self, tmp_path, summary, sample_target):
        bad_dir = tmp_path / "templates"
        bad_dir.mkdir()
        (bad_dir / "stage_infuse.txt").write_text("Task: write one social-media caption\n{summary}")
        with pytest.raises(TemplateError):
            render_stage_prompt(1, summary, sample_target, template_dir=str(bad_dir))


class TestStagePlan:
    def test_two_stage(self):
        plan = stage_plan("two_stage")
        assert plan[0] == ("infuse", ("style", "structural"))
        assert plan[1] == ("refine", ("personality", "style", "structural"))

    def test_order_reversed_swaps_first_family(self):
        plan = stage_plan("order_reversed")
        assert plan[0] == ("infuse", ("personality", "structural"))
        assert len(plan) == 2

    @pytest.mark.parametrize(
        "mode,families",
        [
            ("single_stage", ("personality", "style", "structural")),
            ("style_only", ("style", "structural")),
            ("personality_only", ("personality", "structural")),
        ],
    )
    def test_single_pass_modes(self, mode, families):
        plan = stage_plan(mode)
        assert len(plan) == 1
        assert plan[0] == ("infuse", families)


class TestStage1:
    def test_best_of_two_fixed_texts(self, summary, sample_target):
        provider = MockProvider()
        # candidate A honours the toggles, candidate B omits hashtag/emoji and
        # misses the word count, so A must win after rescoring.
        text_a = ("I saw dashcam video captured near miss incident involving "
                  "conversational conversational conversational truly truly truly #RoadWatch 🚨")
        provider.add_fixture_containing("Task: write one social-media caption", text_a)
        result = stage1_generate(summary, sample_target, GenerationConfig(n=1), _bundle_with(provider))
        score_a = result.best.report.overall

        provider_b = MockProvider()
        text_b = "bland words only"
        provider_b.add_fixture_containing("Task: write one social-media caption", text_b)
        result_b = stage1_generate(summary, sample_target, GenerationConfig(n=1), _bundle_with(provider_b))
        assert score_a > result_b.best.report.overall

    def test_n_one_sole_candidate_is_best(self, summary, sample_target, bundle):
        result = stage1_generate(summary, sample_target, GenerationConfig(n=1), bundle)
        assert result.best_index == 0
        assert len(result.candidates) == 1

    def test_all_candidates_failing_extraction(self, summary, sample_target):
        provider = MockProvider()
        provider.add_fixture_containing("Task: write one social-media caption", "caption text")
        provider.add_fixture_containing("Task: score writing-style intensities", "not json")
        with pytest.raises(AllCandidatesFailed):
            stage1_generate(summary, sample_target, GenerationConfig(n=2), _bundle_with(provider))

    def test_stage1_never_judges_personality(self, summary, sample_target, bundle):
        result = stage1_generate(summary, sample_target, GenerationConfig(n=1), bundle)
        assert result.best.report.s_p is None
        assert result.best.report.s_w is not None

    def test_validates_target(self, summary, sample_target, bundle):
        from tonecap.schema import StructuralControls, ToneProfile

        bad = ToneProfile(
            personality={"NopeTrait": 0.4},
            writing_style={},
            structural=StructuralControls(informativeness=0.5, word_count=10),
        )
        with pytest.raises(Exception):
            stage1_generate(summary, bad, GenerationConfig(), bundle)


class TestStage2:
    def test_refines_prior_and_scores_full_target(self, summary, sample_target, bundle):
        stage1 = stage1_generate(summary, sample_target, GenerationConfig(n=1), bundle)
        stage2 = stage2_refine(summary, sample_target, stage1, GenerationConfig(n=1), bundle)
        assert stage2.stage == 2
        assert stage2.best.report.s_p is not None  # full-target scoring
        assert stage2.best.report.s_w is not None


class TestGenerateToneCaption:
    def test_cross_stage_max(self, summary, sample_target, bundle):
        outcome = generate_tone_caption(summary, sample_target, GenerationConfig(), bundle)
        for stage in outcome.stages:
            for candidate in stage.candidates:
                assert outcome.final.report.overall >= candidate.report.overall - 1e-12

    def test_tie_goes_to_stage_two(self, summary, sample_target):
        # identical captions in both stages force an exact tie on stage bests
        provider = MockProvider()
        fixed = ("I saw dashcam video captured near miss conversational conversational "
                 "conversational anxious anxious anxious truly #RoadWatch 🚨")
        provider.add_fixture_containing("Task: write one social-media caption", fixed)
        provider.add_fixture_containing("Task: restyle the draft caption", fixed)
        # same caption scores differently per stage (different targets), so pin
        # the judges too to manufacture an exact tie
        provider.add_fixture_containing("judge how well the extracted", json.dumps({"score": 0.5}))
        provider.add_fixture_containing("judge the factual consistency", json.dumps({"score": 0.8}))
        outcome = generate_tone_caption(summary, sample_target, GenerationConfig(n=1), _bundle_with(provider))
        assert outcome.stages[0].best.report.overall == outcome.stages[1].best.report.overall
        assert outcome.final.stage == 2

    def test_single_stage_provenance(self, summary, sample_target, bundle):
        outcome = generate_tone_caption(
            summary, sample_target, GenerationConfig(mode="single_stage"), bundle
        )
        assert len(outcome.stages) == 1
        assert outcome.stages[0].families == ("personality", "style", "structural")

    def test_mode_contract_families(self, summary, sample_target, bundle):
        for mode, expected in [
            ("style_only", [("style", "structural")]),
            ("personality_only", [("personality", "structural")]),
            ("order_reversed", [("personality", "structural"), ("personality", "style", "structural")]),
        ]:
            outcome = generate_tone_caption(summary, sample_target, GenerationConfig(mode=mode), bundle)
            assert [s.families for s in outcome.stages] == [tuple(f) for f in expected]

    def test_pure_function_of_inputs(self, summary, sample_target):
        a = generate_tone_caption(summary, sample_target, GenerationConfig(), mock_bundle(seed=5))
        b = generate_tone_caption(summary, sample_target, GenerationConfig(), mock_bundle(seed=5))
        assert a.final.text == b.final.text
        assert a.to_dict() == b.to_dict()

    def test_invalid_mode_rejected(self):
        with pytest.raises(SchemaError):
            GenerationConfig(mode="three_stage")

    def test_modes_tuple_stable(self):
        assert MODES == ("two_stage", "order_reversed", "single_stage", "style_only", "personality_only")
