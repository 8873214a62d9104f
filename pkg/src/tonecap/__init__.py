"""tonecap: tone-controllable caption generation, extraction, and evaluation.

The pipeline pieces, bottom-up:

* :mod:`tonecap.schema` — tone taxonomy, intensity bins, profiles, wire form
* :mod:`tonecap.surface` — regex surface features (hashtags, emojis, counts)
* :mod:`tonecap.providers` / :mod:`tonecap.mock` — the model-service boundary
* :mod:`tonecap.extraction` — caption + summary -> tone profile
* :mod:`tonecap.metrics` — structural/narrative alignment, factual consistency
* :mod:`tonecap.retrieval` — neighbor retrieval, distinct-tone selection
* :mod:`tonecap.generation` — staged tone-controlled caption generation
* :mod:`tonecap.dataset` — corpus -> dataset -> splits -> SFT export; benchmark
* :mod:`tonecap.service` / :mod:`tonecap.cli` — HTTP and operator entry points
"""

from .schema import (
    AttributeInventory,
    IntensityBin,
    StructuralControls,
    ToneProfile,
    bin_informativeness,
    bin_intensity,
    default_inventory,
    dominant_attributes,
    load_inventory,
    profile_from_wire,
    profile_to_wire,
    validate_profile,
)
from .surface import SurfaceFeatures, extract_surface
from .extraction import ExtractionConfig, extract_tone_profile
from .metrics import JudgeConfig, ScoreReport, score_caption, structural_alignment
from .generation import GenerationConfig, generate_tone_caption
from .retrieval import select_distinct_tones, tone_dissimilarity
from .mock import MockProvider, mock_bundle
from .providers import ProviderBundle

__version__ = "0.1.0"

__all__ = [
    "AttributeInventory",
    "ExtractionConfig",
    "GenerationConfig",
    "IntensityBin",
    "JudgeConfig",
    "MockProvider",
    "ProviderBundle",
    "ScoreReport",
    "StructuralControls",
    "SurfaceFeatures",
    "ToneProfile",
    "bin_informativeness",
    "bin_intensity",
    "default_inventory",
    "dominant_attributes",
    "extract_surface",
    "extract_tone_profile",
    "generate_tone_caption",
    "load_inventory",
    "mock_bundle",
    "profile_from_wire",
    "profile_to_wire",
    "score_caption",
    "select_distinct_tones",
    "structural_alignment",
    "tone_dissimilarity",
    "validate_profile",
]
