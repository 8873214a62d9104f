"""The four-step tone extractor, hermetically on the deterministic mock.

The mock provider scores writing styles / traits by counting attribute-name
tokens in the caption (one 0.25 step per occurrence), rates informativeness
by content-word overlap with the summary, and flags location/date/viewpoint
from small lexicons. Swap in a real provider config for live extraction.

Run: python3 demos/03_tone_extraction.py
"""

import json

from tonecap import ExtractionConfig, extract_tone_profile, profile_to_wire
from tonecap.mock import mock_bundle

summary = (
    "A dashcam video captured a near miss incident involving dangerous and careless driving. "
    "A car pulled out from a side road without leaving sufficient space, nearly hitting a cyclist."
)
caption = ("I cant believe that car nearly hit the cyclist in London today "
           "conversational conversational conversational anxious anxious anxious #CyclistLife 😱")

bundle = mock_bundle()
profile = extract_tone_profile(caption, summary, ExtractionConfig(), bundle.extraction)

print("caption:", caption)
print()
print("extracted profile:")
print(json.dumps(profile_to_wire(profile), indent=2, ensure_ascii=False))
