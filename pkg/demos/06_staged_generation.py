"""Staged generation: style+structure infusion, personality refinement,
best-of-n gating, cross-stage best — plus the ablation modes.

Run: python3 demos/06_staged_generation.py
"""

from tonecap import GenerationConfig, generate_tone_caption
from tonecap.mock import mock_bundle
from tonecap.schema import StructuralControls, ToneProfile

summary = (
    "A school bus stopped with flashing lights to let children cross and several cars "
    "failed to halt behind it, passing the extended stop sign at speed."
)
target = ToneProfile(
    personality={"Caring": 0.9, "Serious": 0.5},
    writing_style={"Advisory": 0.8, "Conversational": 0.4},
    structural=StructuralControls(
        informativeness=0.6, word_count=20,
        hashtags=True, emojis=True, first_person=False,
    ),
    role="target",
)

bundle = mock_bundle()
outcome = generate_tone_caption(summary, target, GenerationConfig(n=2), bundle)

for stage in outcome.stages:
    print(f"stage {stage.stage} ({stage.kind}, controls={'/'.join(stage.families)}):")
    for candidate in stage.candidates:
        marker = "*" if candidate.run_index == stage.best_index else " "
        print(f"  {marker} run {candidate.run_index}: overall={candidate.report.overall:.4f} "
              f"fc={candidate.report.fc:.2f}  {candidate.text[:72]}...")
print()
print(f"final (stage {outcome.final.stage}): {outcome.final.text}")
print(f"final overall: {outcome.final.report.overall:.4f}")
print()

print("ablation modes and their stage plans:")
for mode in ("order_reversed", "single_stage", "style_only", "personality_only"):
    result = generate_tone_caption(summary, target, GenerationConfig(mode=mode, n=1), bundle)
    plans = [f"stage{s.stage}:{s.kind}({'+'.join(s.families)})" for s in result.stages]
    print(f"  {mode:<18} -> {'; '.join(plans)}")
