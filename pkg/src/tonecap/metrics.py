"""Caption scoring: structural alignment, judge-backed narrative alignment and
factual consistency, and the aggregate tone/quality scores.

Structural alignment is fully deterministic:

    e_I   = |I_measured - I_target|
    e_len = min(1, |len_measured - len_target| / len_target)
    e_a   = 1 per disagreeing binary attribute (six of them)
    SAS   = 1 - (e_I + e_len + sum e_a) / 8

The word-count error is clamped at 1 so SAS stays in [0, 1] (the raw relative
error is unbounded above). Narrative alignment and factual consistency come
from judge providers with deterministic decoding and strict JSON parsing;
aggregates are NAS = mean of the judged narrative components,
TAS = (NAS + SAS)/2, Overall = (TAS + FC)/2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

from .errors import DegenerateTarget, RangeError, SchemaError
from .extraction import ExtractionConfig, extract_tone_profile
from .providers import ChatProvider, ProviderBundle, chat_json
from .schema import (
    STRUCTURAL_ATTRS,
    AttributeInventory,
    StructuralControls,
    ToneProfile,
    default_inventory,
    validate_profile,
)
from .templates import load_template, render

NARRATIVE_COMPONENTS = ("personality", "style")


@dataclass(frozen=True)
class JudgeConfig:
    model: str = "gpt-4.1-mini"
    temperature: float = 0.0
    top_p: float = 1.0
    max_tokens: int = 256
    template_dir: str | None = None

    def __post_init__(self) -> None:
        # Judge decoding must be deterministic.
        if self.temperature != 0.0:
            raise RangeError("temperature", self.temperature, "exactly 0.0 for judges")


@dataclass(frozen=True)
class ScoreReport:
    """All metric components for one caption; aggregates obey fixed identities.

    ``s_p``/``s_w`` are None when that narrative component was deliberately
    not judged (partial-target scoring during staged generation); NAS is then
    the mean of the judged components only.
    """

    s_p: float | None
    s_w: float | None
    nas: float
    e_i: float
    e_len: float
    attr_errors: Mapping[str, int]
    sas: float
    tas: float
    fc: float
    overall: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "attr_errors", MappingProxyType(dict(self.attr_errors)))

    def to_dict(self) -> dict:
        return {
            "s_p": self.s_p,
            "s_w": self.s_w,
            "nas": self.nas,
            "e_i": self.e_i,
            "e_len": self.e_len,
            "attr_errors": dict(self.attr_errors),
            "sas": self.sas,
            "tas": self.tas,
            "fc": self.fc,
            "overall": self.overall,
        }

    @classmethod
    def from_dict(cls, obj: Mapping) -> "ScoreReport":
        return cls(
            s_p=obj.get("s_p"),
            s_w=obj.get("s_w"),
            nas=obj["nas"],
            e_i=obj["e_i"],
            e_len=obj["e_len"],
            attr_errors={k: int(v) for k, v in obj["attr_errors"].items()},
            sas=obj["sas"],
            tas=obj["tas"],
            fc=obj["fc"],
            overall=obj["overall"],
        )


def structural_alignment(
    target: StructuralControls, measured: StructuralControls
) -> tuple[float, float, float, dict[str, int]]:
    """(sas, e_i, e_len, attr_errors) for a target/measured pair."""
    if target.word_count < 1:
        raise DegenerateTarget("target word_count must be >= 1")
    e_i = abs(measured.informativeness - target.informativeness)
    e_len = min(1.0, abs(measured.word_count - target.word_count) / target.word_count)
    attr_errors = {
        a: int(getattr(target, a) != getattr(measured, a)) for a in STRUCTURAL_ATTRS
    }
    sas = 1.0 - (e_i + e_len + sum(attr_errors.values())) / (2 + len(STRUCTURAL_ATTRS))
    return sas, e_i, e_len, attr_errors


def _judge_score(
    template_name: str,
    target_map: Mapping[str, float],
    extracted_map: Mapping[str, float],
    cfg: JudgeConfig,
    provider: ChatProvider,
) -> float:
    prompt = render(
        load_template(template_name, cfg.template_dir),
        {
            "target": json.dumps(dict(target_map), ensure_ascii=False),
            "extracted": json.dumps(dict(extracted_map), ensure_ascii=False),
        },
        required=("target", "extracted"),
    )
    return chat_json(
        provider,
        model=cfg.model,
        prompt=prompt,
        validate=_validate_score,
        temperature=cfg.temperature,
        top_p=cfg.top_p,
        max_tokens=cfg.max_tokens,
    )


def _validate_score(obj: object) -> float:
    if not isinstance(obj, Mapping) or "score" not in obj:
        raise ValueError("expected {'score': <float>}")
    value = obj["score"]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError("score must be a number")
    if not (0.0 <= value <= 1.0):
        raise RangeError("score", value, "[0, 1]")
    return float(value)


def judge_personality(
    target: Mapping[str, float],
    extracted: Mapping[str, float],
    cfg: JudgeConfig,
    provider: ChatProvider,
) -> float:
    return _judge_score("judge_personality", target, extracted, cfg, provider)


def judge_style(
    target: Mapping[str, float],
    extracted: Mapping[str, float],
    cfg: JudgeConfig,
    provider: ChatProvider,
) -> float:
    return _judge_score("judge_style", target, extracted, cfg, provider)


def factual_consistency(
    caption: str,
    summary: str,
    cfg: JudgeConfig,
    provider: ChatProvider,
) -> float:
    if not summary or not summary.strip():
        raise SchemaError("factual consistency requires a non-empty summary")
    prompt = render(
        load_template("judge_fc", cfg.template_dir),
        {"caption": caption, "summary": summary},
        required=("caption", "summary"),
    )
    return chat_json(
        provider,
        model=cfg.model,
        prompt=prompt,
        validate=_validate_score,
        temperature=cfg.temperature,
        top_p=cfg.top_p,
        max_tokens=cfg.max_tokens,
    )


def assemble_report(
    *,
    s_p: float | None,
    s_w: float | None,
    e_i: float,
    e_len: float,
    attr_errors: Mapping[str, int],
    sas: float,
    fc: float,
) -> ScoreReport:
    parts = [s for s in (s_w, s_p) if s is not None]
    if not parts:
        raise SchemaError("at least one narrative component must be judged")
    nas = sum(parts) / len(parts)
    tas = (nas + sas) / 2.0
    overall = (tas + fc) / 2.0
    return ScoreReport(
        s_p=s_p, s_w=s_w, nas=nas, e_i=e_i, e_len=e_len,
        attr_errors=dict(attr_errors), sas=sas, tas=tas, fc=fc, overall=overall,
    )


def verify_report(report: ScoreReport, tol: float = 1e-12) -> None:
    """Recompute the aggregation identities; raise AssertionError on drift."""
    parts = [s for s in (report.s_w, report.s_p) if s is not None]
    nas = sum(parts) / len(parts)
    sas = 1.0 - (report.e_i + report.e_len + sum(report.attr_errors.values())) / 8.0
    assert abs(report.nas - nas) <= tol, "NAS identity violated"
    assert abs(report.sas - sas) <= tol, "SAS identity violated"
    assert abs(report.tas - (report.nas + report.sas) / 2.0) <= tol, "TAS identity violated"
    assert abs(report.overall - (report.tas + report.fc) / 2.0) <= tol, "Overall identity violated"
    assert 0.0 <= report.sas <= 1.0, "SAS out of [0,1]"


@dataclass(frozen=True)
class ScoredCaption:
    caption: str
    report: ScoreReport
    extracted: ToneProfile


def score_caption(
    caption: str,
    summary: str,
    target: ToneProfile,
    *,
    extraction_cfg: ExtractionConfig,
    judge_cfg: JudgeConfig,
    providers: ProviderBundle,
    inventory: AttributeInventory | None = None,
    narrative: tuple[str, ...] = NARRATIVE_COMPONENTS,
) -> ScoredCaption:
    """Extract the caption's tone, then score it against ``target``.

    ``narrative`` selects which judge-backed components contribute to NAS;
    staged generation scores style-only or personality-only drafts against
    the controls they were actually given.
    """
    if target.role != "target":
        raise SchemaError("score_caption requires a profile with role='target'")
    unknown = set(narrative) - set(NARRATIVE_COMPONENTS)
    if unknown or not narrative:
        raise SchemaError(f"narrative components must be a non-empty subset of {NARRATIVE_COMPONENTS}")
    inv = inventory or default_inventory()
    validate_profile(target, inv)

    extracted = extract_tone_profile(caption, summary, extraction_cfg, providers.extraction, inv)
    sas, e_i, e_len, attr_errors = structural_alignment(target.structural, extracted.structural)
    s_p = (
        judge_personality(target.personality, extracted.personality, judge_cfg, providers.judge)
        if "personality" in narrative
        else None
    )
    s_w = (
        judge_style(target.writing_style, extracted.writing_style, judge_cfg, providers.judge)
        if "style" in narrative
        else None
    )
    fc = factual_consistency(caption, summary, judge_cfg, providers.judge)
    report = assemble_report(
        s_p=s_p, s_w=s_w, e_i=e_i, e_len=e_len, attr_errors=attr_errors, sas=sas, fc=fc
    )
    return ScoredCaption(caption=caption, report=report, extracted=extracted)
