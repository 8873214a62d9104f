"""Deterministic stand-in for the chat and embedding providers.

NON-NORMATIVE: the real pipeline uses LLM providers; this mock exists so the
full pipeline can run hermetically and reproducibly. It is a pure function of
(prompt text, fixture table, seed): identical requests always yield identical
responses.

Resolution order for a chat request:

1. exact fixture (keyed by SHA-256 of the flattened prompt),
2. substring fixtures (insertion order),
3. semantic fallback keyed on the shipped templates' task markers, which
   emits schema-valid responses derived deterministically from the prompt's
   sections,
4. a seeded word-salad generator for unrecognized prompts.

The semantic fallback implements a simple invertible tone model: generated
captions carry one lowercase copy of an attribute name per quantized 0.25
intensity step, and extraction recovers intensities by counting those tokens.
Judges score 1 - mean absolute intensity difference over the key union, and
factual consistency is claim-precision against the summary with a small
contradiction lexicon.
"""

from __future__ import annotations

import hashlib
import json
import re
from typing import Sequence

from .providers import ChatRequest, ChatResponse, ProviderBundle
from .schema import AttributeInventory, default_inventory

_SECTION_RE = re.compile(r"^([^\n<]{1,120}):\n<<<(.*?)>>>", re.S | re.M)

_STOPWORDS = frozenset(
    """a an the and or but if then than so of to in on at by for with from as is are was
    were be been being this that these those it its his her their our your my i me we
    us you he she they them there here when while where who whom which what how why
    not no nor very just only also too into over under again once did does do done
    has have had having will would can could should shall may might must about after
    before between during each few more most other some such own same both any all""".split()
)

LOCATION_WORDS = frozenset(
    {"london", "paris", "berlin", "tokyo", "delhi", "mumbai", "manchester", "brooklyn", "chicago", "sydney"}
)
DATE_TIME_WORDS = frozenset(
    {"today", "yesterday", "tonight", "tomorrow", "noon", "midnight",
     "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"}
)
FIRST_PERSON_WORDS = frozenset({"i", "me", "my", "mine", "we", "us", "our", "ours"})

#: Tokens the mock generator may inject that must not count as factual claims.
MOCK_MARKER_WORDS = frozenset(
    {"london", "today", "truly", "roadwatch", "witness", "saw"}
)

CONTRADICTION_PAIRS = (
    ("hit", "missed"),
    ("hit", "avoided"),
    ("crashed", "avoided"),
    ("stopped", "accelerated"),
    ("overturned", "upright"),
    ("collided", "swerved"),
)

PROPOSAL_POOL = ("Alarmist", "Cryptic", "Breathless", "Clickbait")


def _hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _word_tokens(text: str) -> list[str]:
    return re.findall(r"[a-z0-9'’_-]+", text.lower())


def _content_tokens(text: str) -> list[str]:
    """Ordered, deduplicated content words (len >= 3, not a stopword)."""
    out: list[str] = []
    seen: set[str] = set()
    for tok in re.findall(r"[a-z0-9']+", text.lower()):
        if len(tok) >= 3 and tok not in _STOPWORDS and tok not in seen:
            seen.add(tok)
            out.append(tok)
    return out


def _signature(name: str) -> str:
    return name.lower().replace(" ", "-")


def hash_embed(text: str, dim: int = 256) -> list[float]:
    """Signed feature hashing of lowercase word tokens, L2-normalized."""
    vec = [0.0] * dim
    for tok in _word_tokens(text):
        digest = hashlib.sha256(tok.encode("utf-8")).digest()
        idx = int.from_bytes(digest[:4], "big") % dim
        sign = 1.0 if digest[4] % 2 == 0 else -1.0
        vec[idx] += sign
    norm = sum(v * v for v in vec) ** 0.5
    if norm > 0:
        vec = [v / norm for v in vec]
    return vec


class MockProvider:
    """Deterministic chat + embedding provider for hermetic runs."""

    def __init__(self, seed: int = 0, inventory: AttributeInventory | None = None, embed_dim: int = 256):
        self.seed = seed
        self.inventory = inventory or default_inventory()
        self.embed_dim = embed_dim
        self._exact: dict[str, str] = {}
        self._contains: list[tuple[str, str]] = []

    # -- fixtures ----------------------------------------------------------

    def add_fixture(self, prompt: str, response: str) -> None:
        """Exact-match fixture for a full prompt."""
        self._exact[_hash(prompt)] = response

    def add_fixture_containing(self, needle: str, response: str) -> None:
        """Fixture matched when ``needle`` occurs anywhere in the prompt."""
        self._contains.append((needle, response))

    # -- provider protocol ---------------------------------------------------

    def chat(self, request: ChatRequest) -> ChatResponse:
        prompt = request.prompt_text()
        hit = self._exact.get(_hash(prompt))
        if hit is None:
            for needle, response in self._contains:
                if needle in prompt:
                    hit = response
                    break
        if hit is None:
            hit = self._semantic(prompt, request)
        return ChatResponse(text=hit, model=f"mock/{request.model}", usage={"mock": True})

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        return [hash_embed(t, self.embed_dim) for t in texts]

    # -- semantic fallback ---------------------------------------------------

    def _semantic(self, prompt: str, request: ChatRequest) -> str:
        first = prompt.split("\n", 1)[0]
        sections = self._sections(prompt)
        if "score writing-style intensities" in first:
            return self._extract_intensities(sections, dense=True)
        if "shortlist personality traits" in first:
            return self._extract_intensities(sections, dense=False)
        if "rate how much factual content" in first:
            return self._informativeness(sections)
        if "detect location, date/time" in first:
            return self._structural(sections)
        if "propose one new writing-style attribute" in first:
            return self._proposal(sections)
        if "judge how well the extracted" in first:
            return self._judge_maps(sections)
        if "judge the factual consistency" in first:
            return self._factual(sections)
        if "write one social-media caption" in first or "restyle the draft caption" in first:
            return self._generate(sections)
        return self._fallback(prompt, request)

    @staticmethod
    def _sections(prompt: str) -> dict[str, str]:
        out: dict[str, str] = {}
        for label, body in _SECTION_RE.findall(prompt):
            low = label.lower()
            if "draft caption" in low:
                out["prior"] = body
            elif "caption" in low:
                out["caption"] = body
            elif "summary" in low:
                out["summary"] = body
            elif "inventory" in low or "styles" in low:
                out["inventory"] = body
            elif "spec" in low:
                out["spec"] = body
            elif "target attributes" in low:
                out["target"] = body
            elif "extracted attributes" in low:
                out["extracted"] = body
        return out

    def _names_from(self, sections: dict[str, str], dense: bool) -> list[str]:
        raw = sections.get("inventory")
        if raw:
            try:
                names = json.loads(raw)
                if isinstance(names, list):
                    return [str(n) for n in names]
            except json.JSONDecodeError:
                pass
        return list(self.inventory.writing_styles if dense else self.inventory.personality_traits)

    def _extract_intensities(self, sections: dict[str, str], dense: bool) -> str:
        caption = sections.get("caption", "")
        tokens = _word_tokens(caption)
        scores: dict[str, float] = {}
        for name in self._names_from(sections, dense):
            count = tokens.count(_signature(name))
            value = min(1.0, 0.25 * count)
            if dense:
                scores[name] = value
            elif value > 0:
                scores[name] = value
        return json.dumps(scores, ensure_ascii=False)

    def _informativeness(self, sections: dict[str, str]) -> str:
        summary = set(_content_tokens(sections.get("summary", "")))
        caption = set(_content_tokens(sections.get("caption", "")))
        value = 1.0 if not summary else round(len(summary & caption) / len(summary), 4)
        return json.dumps({"informativeness": value})

    def _structural(self, sections: dict[str, str]) -> str:
        tokens = set(_word_tokens(sections.get("caption", "")))
        flag = lambda hit: "yes" if hit else "no"
        return json.dumps(
            {
                "location": flag(tokens & LOCATION_WORDS),
                "date_time": flag(tokens & DATE_TIME_WORDS),
                "first_person": flag(tokens & FIRST_PERSON_WORDS),
            }
        )

    def _proposal(self, sections: dict[str, str]) -> str:
        caption = sections.get("caption", "")
        idx = int(_hash(f"{caption}|{self.seed}")[:8], 16) % len(PROPOSAL_POOL)
        return json.dumps(
            {
                "style": PROPOSAL_POOL[idx],
                "rationale": "The caption's expressive form is not covered by the current styles.",
            }
        )

    def _judge_maps(self, sections: dict[str, str]) -> str:
        try:
            target = json.loads(sections.get("target", "{}"))
            extracted = json.loads(sections.get("extracted", "{}"))
        except json.JSONDecodeError:
            return json.dumps({"score": 0.0})
        keys = set(target) | set(extracted)
        if not keys:
            return json.dumps({"score": 1.0})
        diff = sum(abs(float(target.get(k, 0.0)) - float(extracted.get(k, 0.0))) for k in keys)
        return json.dumps({"score": round(1.0 - diff / len(keys), 6)})

    def _factual(self, sections: dict[str, str]) -> str:
        summary_tokens = set(_content_tokens(sections.get("summary", "")))
        attr_names = {_signature(n) for n in self.inventory.personality_traits}
        attr_names |= {_signature(n) for n in self.inventory.writing_styles}
        claims = [
            t
            for t in _content_tokens(sections.get("caption", ""))
            if t not in MOCK_MARKER_WORDS and t not in attr_names
        ]
        caption_all = set(_word_tokens(sections.get("caption", "")))
        for a, b in CONTRADICTION_PAIRS:
            if (a in summary_tokens and b in caption_all) or (b in summary_tokens and a in caption_all):
                return json.dumps({"score": 0.1})
        if not claims:
            return json.dumps({"score": 1.0})
        precision = sum(1 for t in claims if t in summary_tokens) / len(claims)
        return json.dumps({"score": round(0.2 + 0.8 * precision, 6)})

    def _generate(self, sections: dict[str, str]) -> str:
        summary = sections.get("summary", "")
        try:
            spec = json.loads(sections.get("spec", "{}"))
        except json.JSONDecodeError:
            spec = {}
        return compose_mock_caption(summary, spec)

    def _fallback(self, prompt: str, request: ChatRequest) -> str:
        vocab = ("road", "event", "camera", "signal", "note", "frame", "clip", "scene")
        digest = _hash(f"{prompt}|{self.seed}")
        words = [vocab[int(digest[i : i + 2], 16) % len(vocab)] for i in range(0, 16, 2)]
        text = " ".join(words)
        if request.response_format == "json":
            return json.dumps({"text": text})
        return text


def compose_mock_caption(summary: str, spec: dict) -> str:
    """Deterministic caption honoring a wire-form tone spec.

    Used by the mock generator: content words come from the summary in
    proportion to the informativeness target, narrative attributes appear as
    repeated lowercase name tokens (one per 0.25 intensity step), structural
    toggles map to fixed marker tokens, and the result is padded/trimmed to
    the exact word_count.
    """
    struct = spec.get("Structural Attributes", {}) or {}
    yes = lambda label: struct.get(label) == "yes"
    try:
        wc = max(1, int(spec.get("word_count", 17)))
    except (TypeError, ValueError):
        wc = 17
    try:
        info = min(1.0, max(0.0, float(spec.get("Informativeness", 0.5))))
    except (TypeError, ValueError):
        info = 0.5

    narrative: dict[str, float] = {}
    for family in ("Writing Style", "Personality"):
        for name, value in (spec.get(family, {}) or {}).items():
            try:
                narrative[name] = max(narrative.get(name, 0.0), float(value))
            except (TypeError, ValueError):
                continue

    content = _content_tokens(summary)
    n_content = min(len(content), max(1, round(info * len(content)))) if content else 0
    chosen = content[:n_content]
    signatures: list[str] = []
    for name, value in narrative.items():
        reps = round(value * 4)
        if reps > 0:
            signatures.extend([_signature(name)] * reps)

    prefix = ["I", "saw"] if yes("First-Person Perspective") else []
    tail: list[str] = []
    if yes("Location"):
        tail += ["in", "London"]
    if yes("Date/Time"):
        tail += ["today"]
    if yes("User Mentions"):
        tail += ["@witness"]
    if yes("Hashtags"):
        tail += ["#RoadWatch"]
    if yes("Emojis"):
        tail += ["🚨"]

    budget = wc - len(prefix) - len(tail)
    if budget < 0:
        tokens = (prefix + tail)[:wc]
        return " ".join(tokens)

    flexible = chosen + signatures
    over = len(flexible) - budget
    if over > 0:
        drop_content = min(over, max(0, len(chosen) - 1))
        chosen = chosen[: len(chosen) - drop_content]
        over -= drop_content
        if over > 0:
            signatures = signatures[: max(0, len(signatures) - over)]
        flexible = (chosen + signatures)[:budget]
    elif over < 0:
        flexible = flexible + ["truly"] * (-over)
    return " ".join(prefix + flexible + tail)


def mock_bundle(seed: int = 0, inventory: AttributeInventory | None = None) -> ProviderBundle:
    """A provider bundle where every role is served by one deterministic mock."""
    provider = MockProvider(seed=seed, inventory=inventory)
    return ProviderBundle(generation=provider, extraction=provider, judge=provider, embedding=provider)
