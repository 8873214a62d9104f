"""Staged tone-controlled caption generation with best-of-n gating.

Default mode runs two stages: stage 1 infuses writing style and structural
controls into a fresh caption; stage 2 restyles the stage-1 winner with the
personality controls while keeping the previously met constraints. Each stage
samples n candidates, scores every candidate against the controls that stage
was given (a stage is never penalized for controls it has not seen), and picks
the best by Overall. The final caption is the best across all executed stages,
ties going to the later stage. Candidates whose factual-consistency score
falls below ``fc_floor`` are excluded from best-selection unless that would
exclude everyone.

Ablation modes: ``order_reversed`` infuses personality+structure first and
refines writing style second; ``single_stage`` applies every control in one
pass; ``style_only`` / ``personality_only`` drop one narrative family
entirely.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import AllCandidatesFailed, RangeError, SchemaError, TransportError
from .extraction import ExtractionConfig
from .metrics import JudgeConfig, ScoreReport, score_caption
from .providers import ChatRequest, ProviderBundle
from .schema import (
    AttributeInventory,
    ToneProfile,
    default_inventory,
    profile_to_json,
    validate_profile,
)
from .templates import load_template, render

MODES = ("two_stage", "order_reversed", "single_stage", "style_only", "personality_only")

_FAMILY_NARRATIVE = {"personality": "personality", "style": "style"}


@dataclass(frozen=True)
class GenerationConfig:
    model: str = "gpt-4.1"
    temperature: float = 0.7
    top_p: float = 1.0
    max_tokens: int = 2048
    n: int = 2
    mode: str = "two_stage"
    fc_floor: float = 0.3
    template_dir: str | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise RangeError("n", self.n, ">= 1")
        if self.mode not in MODES:
            raise SchemaError(f"mode must be one of {MODES}", name=self.mode)
        if self.temperature < 0:
            raise RangeError("temperature", self.temperature, ">= 0")


@dataclass(frozen=True)
class CaptionCandidate:
    text: str
    stage: int
    run_index: int
    profile: ToneProfile
    report: ScoreReport

    def to_dict(self) -> dict:
        from .schema import profile_to_wire

        return {
            "text": self.text,
            "stage": self.stage,
            "run_index": self.run_index,
            "profile": profile_to_wire(self.profile),
            "report": self.report.to_dict(),
        }


@dataclass(frozen=True)
class StageResult:
    stage: int
    kind: str  # "infuse" | "refine"
    families: tuple[str, ...]
    candidates: tuple[CaptionCandidate, ...]
    failures: tuple[str, ...]
    best_index: int
    fc_fallback: bool = False

    @property
    def best(self) -> CaptionCandidate:
        return self.candidates[self.best_index]

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "kind": self.kind,
            "families": list(self.families),
            "candidates": [c.to_dict() for c in self.candidates],
            "failures": list(self.failures),
            "best_index": self.best_index,
            "fc_fallback": self.fc_fallback,
        }


@dataclass(frozen=True)
class GenerationOutcome:
    final: CaptionCandidate
    stages: tuple[StageResult, ...]
    mode: str

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "final": self.final.to_dict(),
            "stages": [s.to_dict() for s in self.stages],
        }


def stage_plan(mode: str) -> tuple[tuple[str, tuple[str, ...]], ...]:
    """(kind, control families) per stage for a mode.

    Families are cumulative: a refine stage's spec includes everything the
    prior stage was asked for, so previously met constraints stay binding.
    """
    if mode == "two_stage":
        return (("infuse", ("style", "structural")), ("refine", ("personality", "style", "structural")))
    if mode == "order_reversed":
        return (("infuse", ("personality", "structural")), ("refine", ("personality", "style", "structural")))
    if mode == "single_stage":
        return (("infuse", ("personality", "style", "structural")),)
    if mode == "style_only":
        return (("infuse", ("style", "structural")),)
    if mode == "personality_only":
        return (("infuse", ("personality", "structural")),)
    raise SchemaError(f"mode must be one of {MODES}", name=mode)


def render_stage_prompt(
    stage: int,
    summary: str,
    target: ToneProfile,
    prior_best: str | None = None,
    *,
    families: tuple[str, ...] | None = None,
    template_dir: str | None = None,
) -> str:
    """Fill the infusion (stage 1) or refinement (stage 2) template.

    By default stage 1 serializes writing style + structural controls and
    stage 2 serializes the full spec alongside the prior caption; ablation
    modes pass explicit ``families``.
    """
    if stage not in (1, 2):
        raise SchemaError("stage must be 1 or 2")
    if stage == 2 and prior_best is None:
        raise SchemaError("stage 2 requires the prior stage's best caption")
    if families is None:
        families = ("style", "structural") if stage == 1 else ("personality", "style", "structural")
    spec_json = profile_to_json(target, include=families)
    if stage == 1:
        return render(
            load_template("stage_infuse", template_dir),
            {"summary": summary, "spec": spec_json},
            required=("summary", "spec"),
        )
    return render(
        load_template("stage_refine", template_dir),
        {"summary": summary, "spec": spec_json, "prior_caption": prior_best or ""},
        required=("summary", "spec", "prior_caption"),
    )


def _partial_target(target: ToneProfile, families: tuple[str, ...]) -> ToneProfile:
    return ToneProfile(
        personality=dict(target.personality) if "personality" in families else {},
        writing_style=dict(target.writing_style) if "style" in families else {},
        structural=target.structural,
        role="target",
    )


def _select_best(candidates: Sequence[CaptionCandidate], fc_floor: float) -> tuple[int, bool]:
    eligible = [i for i, c in enumerate(candidates) if c.report.fc >= fc_floor]
    fallback = not eligible
    pool = eligible or list(range(len(candidates)))
    best = pool[0]
    for i in pool[1:]:
        if candidates[i].report.overall > candidates[best].report.overall:
            best = i
    return best, fallback


def _run_stage(
    *,
    stage_no: int,
    kind: str,
    families: tuple[str, ...],
    summary: str,
    target: ToneProfile,
    prior_best: str | None,
    cfg: GenerationConfig,
    extraction_cfg: ExtractionConfig,
    judge_cfg: JudgeConfig,
    providers: ProviderBundle,
    inventory: AttributeInventory,
) -> StageResult:
    template_stage = 1 if kind == "infuse" else 2
    prompt = render_stage_prompt(
        template_stage, summary, target, prior_best, families=families, template_dir=cfg.template_dir
    )
    narrative = tuple(f for f in ("personality", "style") if f in families)
    scoring_target = _partial_target(target, families)

    candidates: list[CaptionCandidate] = []
    failures: list[str] = []
    for run_index in range(cfg.n):
        try:
            text = _sample(prompt, cfg, providers)
            scored = score_caption(
                text,
                summary,
                scoring_target,
                extraction_cfg=extraction_cfg,
                judge_cfg=judge_cfg,
                providers=providers,
                inventory=inventory,
                narrative=narrative,
            )
        except Exception as e:  # candidate slot fails, run continues
            failures.append(f"run {run_index}: {e}")
            continue
        candidates.append(
            CaptionCandidate(
                text=scored.caption,
                stage=stage_no,
                run_index=run_index,
                profile=scored.extracted,
                report=scored.report,
            )
        )
    if not candidates:
        raise AllCandidatesFailed(
            f"stage {stage_no}: all {cfg.n} candidates failed ({'; '.join(failures)})"
        )
    best_index, fc_fallback = _select_best(candidates, cfg.fc_floor)
    return StageResult(
        stage=stage_no,
        kind=kind,
        families=families,
        candidates=tuple(candidates),
        failures=tuple(failures),
        best_index=best_index,
        fc_fallback=fc_fallback,
    )


def _sample(prompt: str, cfg: GenerationConfig, providers: ProviderBundle) -> str:
    request = ChatRequest(
        model=cfg.model,
        messages=(("user", prompt),),
        temperature=cfg.temperature,
        top_p=cfg.top_p,
        max_tokens=cfg.max_tokens,
    )
    try:
        return providers.generation.chat(request).text.strip()
    except TransportError:
        # one retry per candidate slot on transport blips
        return providers.generation.chat(request).text.strip()


def stage1_generate(
    summary: str,
    target: ToneProfile,
    cfg: GenerationConfig,
    providers: ProviderBundle,
    *,
    extraction_cfg: ExtractionConfig | None = None,
    judge_cfg: JudgeConfig | None = None,
    inventory: AttributeInventory | None = None,
) -> StageResult:
    """Writing-style + structural infusion with best-of-n selection."""
    inv = inventory or default_inventory()
    validate_profile(target, inv)
    return _run_stage(
        stage_no=1,
        kind="infuse",
        families=("style", "structural"),
        summary=summary,
        target=target,
        prior_best=None,
        cfg=cfg,
        extraction_cfg=extraction_cfg or ExtractionConfig(),
        judge_cfg=judge_cfg or JudgeConfig(),
        providers=providers,
        inventory=inv,
    )


def stage2_refine(
    summary: str,
    target: ToneProfile,
    stage1: StageResult,
    cfg: GenerationConfig,
    providers: ProviderBundle,
    *,
    extraction_cfg: ExtractionConfig | None = None,
    judge_cfg: JudgeConfig | None = None,
    inventory: AttributeInventory | None = None,
) -> StageResult:
    """Personality refinement of the stage-1 winner, scored on the full target."""
    if not stage1.candidates:
        raise SchemaError("stage 2 requires a stage-1 result with candidates")
    inv = inventory or default_inventory()
    validate_profile(target, inv)
    return _run_stage(
        stage_no=2,
        kind="refine",
        families=("personality", "style", "structural"),
        summary=summary,
        target=target,
        prior_best=stage1.best.text,
        cfg=cfg,
        extraction_cfg=extraction_cfg or ExtractionConfig(),
        judge_cfg=judge_cfg or JudgeConfig(),
        providers=providers,
        inventory=inv,
    )


def generate_tone_caption(
    summary: str,
    target: ToneProfile,
    cfg: GenerationConfig,
    providers: ProviderBundle,
    *,
    extraction_cfg: ExtractionConfig | None = None,
    judge_cfg: JudgeConfig | None = None,
    inventory: AttributeInventory | None = None,
) -> GenerationOutcome:
    """Run the configured stage plan and return the cross-stage best caption."""
    if not summary or not summary.strip():
        raise SchemaError("generation requires a non-empty summary")
    inv = inventory or default_inventory()
    validate_profile(target, inv)
    extraction_cfg = extraction_cfg or ExtractionConfig()
    judge_cfg = judge_cfg or JudgeConfig()

    stages: list[StageResult] = []
    prior: str | None = None
    for stage_no, (kind, families) in enumerate(stage_plan(cfg.mode), start=1):
        result = _run_stage(
            stage_no=stage_no,
            kind=kind,
            families=families,
            summary=summary,
            target=target,
            prior_best=prior,
            cfg=cfg,
            extraction_cfg=extraction_cfg,
            judge_cfg=judge_cfg,
            providers=providers,
            inventory=inv,
        )
        stages.append(result)
        prior = result.best.text

    final = stages[0].best
    for stage in stages[1:]:
        # ties go to the later stage, which has seen every control family
        if stage.best.report.overall >= final.report.overall:
            final = stage.best
    return GenerationOutcome(final=final, stages=tuple(stages), mode=cfg.mode)
