"""Tone taxonomy: attribute inventory, intensity bins, structural controls, profiles.

Everything in this module is immutable after construction and safe for
unrestricted concurrent use. The JSON wire form of a profile is pinned (key
names and yes/no strings are part of the external contract) — see
``profile_to_wire`` / ``profile_from_wire``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import RangeError, SchemaError, UnknownAttribute

ATTRIBUTE_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9 _\-()]*\Z")

#: The six binary structural attributes, in canonical (wire) order.
STRUCTURAL_ATTRS = ("user_mentions", "hashtags", "emojis", "date_time", "location", "first_person")

WIRE_STRUCTURAL_LABELS = {
    "user_mentions": "User Mentions",
    "hashtags": "Hashtags",
    "emojis": "Emojis",
    "date_time": "Date/Time",
    "location": "Location",
    "first_person": "First-Person Perspective",
}
_WIRE_LABEL_TO_ATTR = {v: k for k, v in WIRE_STRUCTURAL_LABELS.items()}

PROFILE_ROLES = ("target", "extracted")


@dataclass(frozen=True)
class IntensityBin:
    """One intensity level. Bins are half-open [lo, hi), top bin closed."""

    label: str
    display: str
    lo: float
    hi: float
    index: int


_EDGES = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)

INTENSITY_BINS = tuple(
    IntensityBin(label, display, _EDGES[i], _EDGES[i + 1], i)
    for i, (label, display) in enumerate(
        [
            ("Absent", "Absent"),
            ("Subtle", "Subtle"),
            ("Moderate", "Moderate"),
            ("Strong", "Strong"),
            ("VeryStrong", "Very Strong"),
        ]
    )
)

INFORMATIVENESS_BINS = tuple(
    IntensityBin(label, label, _EDGES[i], _EDGES[i + 1], i)
    for i, label in enumerate(["Negligible", "Minimal", "Moderate", "High", "Extensive"])
)


def _bin_for(x: float, bins: tuple[IntensityBin, ...], field_name: str) -> IntensityBin:
    if not isinstance(x, (int, float)) or isinstance(x, bool) or not (0.0 <= x <= 1.0):
        raise RangeError(field_name, x, "[0, 1]")
    for b in bins[:-1]:
        if b.lo <= x < b.hi:
            return b
    return bins[-1]  # [0.8, 1.0] closed


def bin_intensity(x: float) -> IntensityBin:
    """Map an intensity in [0,1] to its bin; boundaries go up, top bin closed."""
    return _bin_for(x, INTENSITY_BINS, "intensity")


def bin_informativeness(x: float) -> IntensityBin:
    """Same partition as ``bin_intensity`` with the informativeness labels."""
    return _bin_for(x, INFORMATIVENESS_BINS, "informativeness")


# ---------------------------------------------------------------------------
# Inventory


@dataclass(frozen=True)
class AttributeInventory:
    """The legal personality-trait and writing-style names.

    The shipped default has 215 traits and 16 styles; both lists are data and
    may be replaced by the user (see ``load_inventory``).
    """

    personality_traits: tuple[str, ...]
    writing_styles: tuple[str, ...]
    source: str = "<memory>"
    _trait_set: frozenset[str] = field(init=False, repr=False, compare=False)
    _style_set: frozenset[str] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        _check_names("personality_traits", self.personality_traits)
        _check_names("writing_styles", self.writing_styles)
        object.__setattr__(self, "_trait_set", frozenset(self.personality_traits))
        object.__setattr__(self, "_style_set", frozenset(self.writing_styles))

    def has_trait(self, name: str) -> bool:
        return name in self._trait_set

    def has_style(self, name: str) -> bool:
        return name in self._style_set

    def to_dict(self) -> dict:
        return {
            "personality_traits": list(self.personality_traits),
            "writing_styles": list(self.writing_styles),
        }


def _check_names(kind: str, names: Sequence[str]) -> None:
    if not names:
        raise SchemaError(f"{kind} must be non-empty", name=kind)
    seen: set[str] = set()
    for n in names:
        if not isinstance(n, str) or not ATTRIBUTE_NAME_RE.match(n):
            raise SchemaError(f"malformed {kind} name", name=str(n))
        low = n.lower()
        if low in seen:
            raise SchemaError(f"duplicate {kind} name (case-insensitive)", name=n)
        seen.add(low)


def load_inventory(path: str) -> AttributeInventory:
    """Load and validate an inventory JSON file.

    Format: ``{"personality_traits": [...], "writing_styles": [...]}``.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        raise SchemaError(f"cannot read inventory: {e}", name=str(path)) from e
    except json.JSONDecodeError as e:
        raise SchemaError(f"inventory is not valid JSON: {e}", name=str(path)) from e
    if not isinstance(data, dict):
        raise SchemaError("inventory must be a JSON object", name=str(path))
    for key in ("personality_traits", "writing_styles"):
        if key not in data or not isinstance(data[key], list):
            raise SchemaError(f"inventory missing list field {key!r}", name=str(path))
    return AttributeInventory(
        personality_traits=tuple(data["personality_traits"]),
        writing_styles=tuple(data["writing_styles"]),
        source=str(path),
    )


@lru_cache(maxsize=1)
def default_inventory() -> AttributeInventory:
    """The packaged default inventory (215 traits, 16 styles)."""
    text = resources.files("tonecap").joinpath("data/inventory.json").read_text("utf-8")
    data = json.loads(text)
    return AttributeInventory(
        personality_traits=tuple(data["personality_traits"]),
        writing_styles=tuple(data["writing_styles"]),
        source="tonecap:data/inventory.json",
    )


# ---------------------------------------------------------------------------
# Structural controls and profiles


@dataclass(frozen=True)
class StructuralControls:
    """Presentation-level controls: informativeness, word count, six toggles."""

    informativeness: float
    word_count: int
    hashtags: bool = False
    emojis: bool = False
    user_mentions: bool = False
    location: bool = False
    date_time: bool = False
    first_person: bool = False

    def __post_init__(self) -> None:
        if isinstance(self.informativeness, bool) or not isinstance(self.informativeness, (int, float)):
            raise RangeError("informativeness", self.informativeness, "[0, 1]")
        if not (0.0 <= self.informativeness <= 1.0):
            raise RangeError("informativeness", self.informativeness, "[0, 1]")
        if isinstance(self.word_count, bool) or not isinstance(self.word_count, int) or self.word_count < 1:
            raise RangeError("word_count", self.word_count, ">= 1")
        for attr in STRUCTURAL_ATTRS:
            if not isinstance(getattr(self, attr), bool):
                raise RangeError(attr, getattr(self, attr), "boolean")

    def flags(self) -> dict[str, bool]:
        return {a: getattr(self, a) for a in STRUCTURAL_ATTRS}


@dataclass(frozen=True)
class ToneProfile:
    """A full tone specification or measurement.

    ``personality`` and ``writing_style`` are sparse maps (absent key means
    intensity 0). ``role`` records whether this profile is a generation target
    or was extracted from an existing caption.
    """

    personality: Mapping[str, float]
    writing_style: Mapping[str, float]
    structural: StructuralControls
    role: str = "target"

    def __post_init__(self) -> None:
        if self.role not in PROFILE_ROLES:
            raise SchemaError(f"role must be one of {PROFILE_ROLES}", name=self.role)
        object.__setattr__(self, "personality", MappingProxyType(dict(self.personality)))
        object.__setattr__(self, "writing_style", MappingProxyType(dict(self.writing_style)))

    def with_role(self, role: str) -> "ToneProfile":
        return ToneProfile(dict(self.personality), dict(self.writing_style), self.structural, role)

    def narrative_items(self) -> list[tuple[str, float]]:
        """Personality then style entries, as one sparse narrative vector."""
        out = [(f"p:{k}", v) for k, v in self.personality.items()]
        out += [(f"w:{k}", v) for k, v in self.writing_style.items()]
        return out


def validate_profile(profile: ToneProfile, inventory: AttributeInventory) -> None:
    """Raise unless every profile invariant holds against ``inventory``."""
    for name, value in profile.personality.items():
        if not inventory.has_trait(name):
            raise UnknownAttribute(name, "personality trait")
        _check_intensity(f"personality[{name}]", value)
    for name, value in profile.writing_style.items():
        if not inventory.has_style(name):
            raise UnknownAttribute(name, "writing style")
        _check_intensity(f"writing_style[{name}]", value)
    # StructuralControls re-validates on construction; re-check here so that
    # profiles deserialized through other paths still get caught.
    s = profile.structural
    if not (0.0 <= s.informativeness <= 1.0):
        raise RangeError("informativeness", s.informativeness, "[0, 1]")
    if s.word_count < 1:
        raise RangeError("word_count", s.word_count, ">= 1")


def _check_intensity(field_name: str, value: object) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise RangeError(field_name, value, "[0, 1]")
    if not (0.0 <= value <= 1.0):
        raise RangeError(field_name, value, "[0, 1]")


#: Dominance thresholds: traits below 0.4 and styles below 0.2 are not
#: considered expressed strongly enough to steer a caption.
TRAIT_DOMINANCE_THRESHOLD = 0.4
STYLE_DOMINANCE_THRESHOLD = 0.2


def dominant_attributes(profile: ToneProfile) -> tuple[list[str], list[str]]:
    """Traits with intensity >= 0.4 and styles >= 0.2, strongest first."""
    traits = sorted(
        (name for name, v in profile.personality.items() if v >= TRAIT_DOMINANCE_THRESHOLD),
        key=lambda n: (-profile.personality[n], n),
    )
    styles = sorted(
        (name for name, v in profile.writing_style.items() if v >= STYLE_DOMINANCE_THRESHOLD),
        key=lambda n: (-profile.writing_style[n], n),
    )
    return traits, styles


# ---------------------------------------------------------------------------
# Wire form

_FAMILIES = ("personality", "style", "structural")


def profile_to_wire(profile: ToneProfile, include: Iterable[str] = _FAMILIES) -> dict:
    """Serialize to the pinned JSON wire form.

    ``include`` restricts which control families appear (used when a
    generation stage is handed only part of the target).
    """
    include = tuple(include)
    out: dict = {}
    if "personality" in include:
        out["Personality"] = {k: v for k, v in profile.personality.items()}
    if "style" in include:
        out["Writing Style"] = {k: v for k, v in profile.writing_style.items()}
    if "structural" in include:
        s = profile.structural
        out["Informativeness"] = s.informativeness
        out["Structural Attributes"] = {
            WIRE_STRUCTURAL_LABELS[a]: ("yes" if getattr(s, a) else "no") for a in STRUCTURAL_ATTRS
        }
        out["word_count"] = s.word_count
    return out


def profile_from_wire(obj: Mapping, role: str = "target") -> ToneProfile:
    """Parse the wire form back into a profile. Strict about yes/no strings."""
    if not isinstance(obj, Mapping):
        raise SchemaError("profile wire form must be a JSON object")
    personality = _wire_map(obj.get("Personality", {}), "Personality")
    style = _wire_map(obj.get("Writing Style", {}), "Writing Style")
    if "Informativeness" not in obj:
        raise SchemaError("profile missing 'Informativeness'")
    if "word_count" not in obj:
        raise SchemaError("profile missing 'word_count'")
    info = obj["Informativeness"]
    wc = obj["word_count"]
    if isinstance(wc, bool) or not isinstance(wc, int):
        raise SchemaError("word_count must be an integer")
    raw_flags = obj.get("Structural Attributes", {})
    if not isinstance(raw_flags, Mapping):
        raise SchemaError("'Structural Attributes' must be an object")
    flags: dict[str, bool] = {}
    for label, val in raw_flags.items():
        attr = _WIRE_LABEL_TO_ATTR.get(label)
        if attr is None:
            raise SchemaError("unknown structural attribute", name=str(label))
        if val not in ("yes", "no"):
            raise SchemaError(f"structural attribute {label!r} must be 'yes' or 'no'", name=str(label))
        flags[attr] = val == "yes"
    structural = StructuralControls(informativeness=float(info), word_count=wc, **flags)
    return ToneProfile(personality=personality, writing_style=style, structural=structural, role=role)


def _wire_map(obj: object, label: str) -> dict[str, float]:
    if not isinstance(obj, Mapping):
        raise SchemaError(f"{label!r} must be an object")
    out: dict[str, float] = {}
    for k, v in obj.items():
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise SchemaError(f"{label}[{k}] must be a number", name=str(k))
        out[str(k)] = float(v)
    return out


def profile_to_json(profile: ToneProfile, include: Iterable[str] = _FAMILIES) -> str:
    return json.dumps(profile_to_wire(profile, include), ensure_ascii=False)


def profile_from_json(text: str, role: str = "target") -> ToneProfile:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"profile is not valid JSON: {e}") from e
    return profile_from_wire(obj, role)
