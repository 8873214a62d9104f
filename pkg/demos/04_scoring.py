"""Caption scoring: structural alignment by formula, narrative/factual by judge.

Run: python3 demos/04_scoring.py
"""

import json

from tonecap import ExtractionConfig, JudgeConfig, score_caption, structural_alignment
from tonecap.mock import compose_mock_caption, mock_bundle
from tonecap.schema import StructuralControls, ToneProfile, profile_to_wire

# structural alignment alone is a closed-form computation
target = StructuralControls(informativeness=0.5, word_count=10, hashtags=True)
measured = StructuralControls(informativeness=0.6, word_count=12, hashtags=False)
sas, e_i, e_len, attr_errors = structural_alignment(target, measured)
print(f"structural alignment: sas={sas} (e_i={e_i:.3f}, e_len={e_len:.3f}, "
      f"attribute mismatches={sum(attr_errors.values())})")
print()

summary = ("A pickup towing a trailer fishtailed on a wet curve, crossed the center line, "
           "and came to rest blocking the shoulder while other cars slowed around it.")
spec = ToneProfile(
    personality={"Serious": 0.6},
    writing_style={"Advisory": 0.75, "Factual": 0.5},
    structural=StructuralControls(informativeness=0.5, word_count=18, hashtags=True, emojis=True),
    role="target",
)

bundle = mock_bundle()
caption = compose_mock_caption(summary, profile_to_wire(spec))
print("candidate caption:", caption)

scored = score_caption(
    caption, summary, spec,
    extraction_cfg=ExtractionConfig(), judge_cfg=JudgeConfig(), providers=bundle,
)
print()
print("score report:")
print(json.dumps(scored.report.to_dict(), indent=2))
