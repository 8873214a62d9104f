"""Neighbor retrieval and max-min distinct tone selection.

Run: python3 demos/05_distinct_tones.py
"""

from tonecap import ExtractionConfig, extract_tone_profile, select_distinct_tones, tone_dissimilarity
from tonecap.mock import mock_bundle
from tonecap.retrieval import build_index, knn_neighbors
from tonecap.schema import dominant_attributes

videos = {
    "v1": ("A car pulled out without looking and nearly hit a cyclist at a junction.",
           "cant believe this close call conversational conversational anxious anxious anxious 😱"),
    "v2": ("A car failed to yield at a junction and a cyclist braked hard to avoid a collision.",
           "driver failed to yield cyclist braked factual factual factual"),
    "v3": ("A cyclist was cut off by a turning car at a busy junction during rush hour.",
           "give cyclists room at junctions advisory advisory advisory caring caring"),
    "v4": ("A van blocked the cycle lane at a junction forcing riders into traffic.",
           "blocking the lane is simply reckless judgemental judgemental critical critical"),
    "v5": ("A truck overturned on a highway ramp and spilled gravel across two lanes.",
           "the most dramatic spill youll ever see dramatic dramatic exaggeration exaggeration"),
}

bundle = mock_bundle()
index = build_index({vid: s for vid, (s, _) in videos.items()}, bundle.embedding)
neighbors = knn_neighbors("v1", index, k=4)
print("nearest neighbors of v1 by summary cosine:")
for vid, sim in neighbors.neighbors:
    print(f"  {vid}: {sim:+.3f}")
print()

cfg = ExtractionConfig()
profiles = {
    vid: extract_tone_profile(caption, summary, cfg, bundle.extraction)
    for vid, (summary, caption) in videos.items()
}
ref = profiles["v1"]
candidates = [(vid, profiles[vid]) for vid, _ in neighbors.neighbors]

print("tone dissimilarity to v1:")
for vid, profile in candidates:
    print(f"  {vid}: {tone_dissimilarity(ref, profile):.3f}")
print()

selected = select_distinct_tones(ref, candidates, m=2)
print("selected the 2 most distinct tone profiles:")
for vid, profile in selected:
    traits, styles = dominant_attributes(profile)
    print(f"  {vid}: dominant styles={styles} traits={traits}")
