"""Tone profiles: the attribute inventory, intensity bins, and the wire form.

Run: python3 demos/01_tone_profiles.py
"""

import json

from tonecap import (
    StructuralControls,
    ToneProfile,
    bin_informativeness,
    bin_intensity,
    default_inventory,
    dominant_attributes,
    profile_to_wire,
    validate_profile,
)

inv = default_inventory()
print(f"inventory: {len(inv.personality_traits)} personality traits, "
      f"{len(inv.writing_styles)} writing styles")
print("styles:", ", ".join(inv.writing_styles))
print()

print("intensity bins (half-open, top bin closed):")
for x in (0.0, 0.1, 0.2, 0.45, 0.6, 0.8, 0.85, 1.0):
    b = bin_intensity(x)
    print(f"  {x:>4} -> {b.display:<12} [{b.lo}, {b.hi}{']' if b.hi == 1.0 else ')'}")
print("informativeness 0.85 ->", bin_informativeness(0.85).label)
print()

profile = ToneProfile(
    personality={"Anxious": 0.8, "Angry": 0.4, "Emotional": 0.5},
    writing_style={"Exaggeration": 0.5, "Judgemental": 0.3, "Conversational": 0.75, "Factual": 0.1},
    structural=StructuralControls(
        informativeness=0.4, word_count=17,
        hashtags=True, emojis=True, first_person=True,
    ),
    role="target",
)
validate_profile(profile, inv)

traits, styles = dominant_attributes(profile)
print("dominant traits (>= 0.4):", traits)
print("dominant styles (>= 0.2):", styles)
print()
print("wire form:")
print(json.dumps(profile_to_wire(profile), indent=2, ensure_ascii=False))
