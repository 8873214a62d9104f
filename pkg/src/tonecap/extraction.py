"""Tone extraction: a caption plus a neutral summary -> a ToneProfile.

Surface attributes (hashtags, mentions, emojis, word count) come from
``tonecap.surface``; the four narrative/structural steps go through the chat
provider with strict JSON parsing and fail fast in step order:

1. writing-style intensities (dense over the inventory),
2. personality shortlist (sparse),
3. informativeness relative to the summary,
4. location / date-time / first-person flags.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .errors import (
    DuplicateProposal,
    ExtractionError,
    ProviderError,
    RangeError,
    SchemaError,
    ToneCapError,
    UnknownAttribute,
)
from .providers import ChatProvider, chat_json
from .schema import (
    AttributeInventory,
    StructuralControls,
    ToneProfile,
    default_inventory,
    validate_profile,
)
from .surface import extract_surface
from .templates import load_template, render


@dataclass(frozen=True)
class ExtractionConfig:
    model: str = "gpt-4.1-mini"
    temperature: float = 0.4
    top_p: float = 1.0
    max_tokens: int = 1024
    style_proposal_threshold: float = 0.2
    template_dir: str | None = None

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise RangeError("temperature", self.temperature, ">= 0")


def _call(provider: ChatProvider, cfg: ExtractionConfig, prompt: str, validate):
    return chat_json(
        provider,
        model=cfg.model,
        prompt=prompt,
        validate=validate,
        temperature=cfg.temperature,
        top_p=cfg.top_p,
        max_tokens=cfg.max_tokens,
    )


def _intensity_map(obj: object, names: frozenset[str] | None, kind: str) -> dict[str, float]:
    if not isinstance(obj, Mapping):
        raise ValueError(f"expected a JSON object of {kind} intensities")
    out: dict[str, float] = {}
    for name, value in obj.items():
        if names is not None and name not in names:
            raise UnknownAttribute(str(name), kind)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"{kind} {name!r} intensity must be a number")
        if not (0.0 <= value <= 1.0):
            raise RangeError(f"{kind}[{name}]", value, "[0, 1]")
        out[str(name)] = float(value)
    return out


def extract_writing_style(
    caption: str,
    summary: str,
    cfg: ExtractionConfig,
    provider: ChatProvider,
    inventory: AttributeInventory | None = None,
) -> dict[str, float]:
    """Step 1: intensities for every writing style in the inventory."""
    inv = inventory or default_inventory()
    prompt = render(
        load_template("extract_style", cfg.template_dir),
        {
            "caption": caption,
            "summary": summary,
            "inventory": json.dumps(list(inv.writing_styles), ensure_ascii=False),
        },
        required=("caption", "summary", "inventory"),
    )
    style_set = frozenset(inv.writing_styles)

    def validate(obj: object) -> dict[str, float]:
        sparse = _intensity_map(obj, style_set, "writing style")
        return {name: sparse.get(name, 0.0) for name in inv.writing_styles}

    return _call(provider, cfg, prompt, validate)


def extract_personality(
    caption: str,
    summary: str,
    cfg: ExtractionConfig,
    provider: ChatProvider,
    inventory: AttributeInventory | None = None,
) -> dict[str, float]:
    """Step 2: sparse shortlist of projected traits with intensities."""
    inv = inventory or default_inventory()
    prompt = render(
        load_template("extract_personality", cfg.template_dir),
        {
            "caption": caption,
            "summary": summary,
            "inventory": json.dumps(list(inv.personality_traits), ensure_ascii=False),
        },
        required=("caption", "summary", "inventory"),
    )
    trait_set = frozenset(inv.personality_traits)
    return _call(provider, cfg, prompt, lambda obj: _intensity_map(obj, trait_set, "personality trait"))


def extract_informativeness(
    caption: str,
    summary: str,
    cfg: ExtractionConfig,
    provider: ChatProvider,
) -> float:
    """Step 3: fraction of the summary's factual content the caption conveys."""
    prompt = render(
        load_template("extract_informativeness", cfg.template_dir),
        {"caption": caption, "summary": summary},
        required=("caption", "summary"),
    )

    def validate(obj: object) -> float:
        if not isinstance(obj, Mapping) or "informativeness" not in obj:
            raise ValueError("expected {'informativeness': <float>}")
        value = obj["informativeness"]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError("informativeness must be a number")
        if not (0.0 <= value <= 1.0):
            raise RangeError("informativeness", value, "[0, 1]")
        return float(value)

    return _call(provider, cfg, prompt, validate)


_FLAG_KEYS = ("location", "date_time", "first_person")


def extract_structural_flags(
    caption: str,
    cfg: ExtractionConfig,
    provider: ChatProvider,
) -> dict[str, bool]:
    """Step 4: location / date-time presence and first-person framing."""
    prompt = render(
        load_template("extract_structural", cfg.template_dir),
        {"caption": caption},
        required=("caption",),
    )

    def validate(obj: object) -> dict[str, bool]:
        if not isinstance(obj, Mapping):
            raise ValueError("expected a JSON object of yes/no flags")
        out: dict[str, bool] = {}
        for key in _FLAG_KEYS:
            value = obj.get(key)
            if value not in ("yes", "no"):
                raise ValueError(f"flag {key!r} must be 'yes' or 'no'")
            out[key] = value == "yes"
        return out

    return _call(provider, cfg, prompt, validate)


def extract_tone_profile(
    caption: str,
    summary: str,
    cfg: ExtractionConfig,
    provider: ChatProvider,
    inventory: AttributeInventory | None = None,
) -> ToneProfile:
    """Run all four steps plus surface extraction; fail fast on the first error.

    Errors are re-raised as ExtractionError tagged with the 1-based step index
    so downstream reports can say which step broke.
    """
    inv = inventory or default_inventory()
    surface = extract_surface(caption)

    def step(index: int, fn, *args):
        try:
            return fn(*args)
        except (ProviderError, ToneCapError) as e:
            raise ExtractionError(index, e) from e

    styles = step(1, extract_writing_style, caption, summary, cfg, provider, inv)
    personality = step(2, extract_personality, caption, summary, cfg, provider, inv)
    informativeness = step(3, extract_informativeness, caption, summary, cfg, provider)
    flags = step(4, extract_structural_flags, caption, cfg, provider)

    structural = StructuralControls(
        informativeness=informativeness,
        word_count=max(1, surface.word_count),
        hashtags=bool(surface.hashtags),
        emojis=bool(surface.emojis),
        user_mentions=bool(surface.mentions),
        location=flags["location"],
        date_time=flags["date_time"],
        first_person=flags["first_person"],
    )
    profile = ToneProfile(
        personality=personality,
        writing_style=styles,
        structural=structural,
        role="extracted",
    )
    validate_profile(profile, inv)
    return profile


# ---------------------------------------------------------------------------
# Writing-style inventory refinement (human-gated)


@dataclass(frozen=True)
class StyleProposal:
    caption_id: str
    proposed_style: str
    rationale: str
    status: str = "pending"

    def to_dict(self) -> dict:
        return {
            "caption_id": self.caption_id,
            "proposed_style": self.proposed_style,
            "rationale": self.rationale,
            "status": self.status,
        }


def propose_style_candidate(
    caption: str,
    summary: str,
    current_styles: Mapping[str, float],
    cfg: ExtractionConfig,
    provider: ChatProvider,
    inventory: AttributeInventory | None = None,
    caption_id: str | None = None,
) -> StyleProposal:
    """Ask for one new style candidate when no existing style registered.

    Precondition: every extracted style intensity is below the configured
    threshold. The proposal never mutates the inventory; approval happens in a
    separate review step.
    """
    inv = inventory or default_inventory()
    threshold = cfg.style_proposal_threshold
    offenders = {k: v for k, v in current_styles.items() if v >= threshold}
    if offenders:
        raise SchemaError(
            f"style proposal requires all intensities < {threshold}; got {sorted(offenders)}"
        )
    prompt = render(
        load_template("propose_style", cfg.template_dir),
        {
            "caption": caption,
            "summary": summary,
            "inventory": json.dumps(list(inv.writing_styles), ensure_ascii=False),
        },
        required=("caption", "summary", "inventory"),
    )

    def validate(obj: object) -> tuple[str, str]:
        if not isinstance(obj, Mapping) or not isinstance(obj.get("style"), str) or not obj["style"].strip():
            raise ValueError("expected {'style': <name>, 'rationale': <text>}")
        return obj["style"].strip(), str(obj.get("rationale", "")).strip()

    style, rationale = _call(provider, cfg, prompt, validate)
    existing = {s.lower() for s in inv.writing_styles}
    if style.lower() in existing:
        raise DuplicateProposal(f"proposed style {style!r} already in inventory")
    if caption_id is None:
        import hashlib

        caption_id = hashlib.sha1(caption.encode("utf-8")).hexdigest()[:12]
    return StyleProposal(caption_id=caption_id, proposed_style=style, rationale=rationale)


_queue_lock = threading.Lock()


def append_proposal(path: str | Path, proposal: StyleProposal) -> None:
    """Append one proposal to the JSONL review queue (serialized writes)."""
    line = json.dumps(proposal.to_dict(), ensure_ascii=False)
    with _queue_lock:
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")


def load_proposals(path: str | Path) -> list[StyleProposal]:
    out: list[StyleProposal] = []
    with open(path, "r", encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                out.append(
                    StyleProposal(
                        caption_id=obj["caption_id"],
                        proposed_style=obj["proposed_style"],
                        rationale=obj.get("rationale", ""),
                        status=obj.get("status", "pending"),
                    )
                )
            except (json.JSONDecodeError, KeyError) as e:
                raise SchemaError(f"bad proposal line: {e}", line=i) from e
    return out
