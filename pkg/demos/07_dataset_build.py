"""End-to-end dataset construction: corpus -> records -> splits -> SFT triplets.

Everything runs on the deterministic mock, so two runs produce byte-identical
artifacts. Files land in a temp directory printed at the end.

Run: python3 demos/07_dataset_build.py
"""

import json
import tempfile
from pathlib import Path

from tonecap import dataset as ds
from tonecap.mock import mock_bundle

corpus = [
    ("v01", "A truck overturned on the highway ramp spilling gravel across two lanes.", "gravel chaos conversational conversational anxious anxious #fail 😱"),
    ("v02", "A sedan ran a red light at a junction and clipped a delivery van.", "sedan ran the light factual factual factual"),
    ("v03", "A cyclist swerved to avoid a suddenly opened car door.", "watch those doors advisory advisory caring caring"),
    ("v04", "A motorcycle weaved between cars and nearly rear-ended a bus.", "wildest weaving ever exaggeration exaggeration angry angry 🚨"),
    ("v05", "A pickup towing a trailer fishtailed on a wet curve.", "reckless towing judgemental judgemental critical critical"),
    ("v06", "A driver reversed into a parking bollard twice.", "bollard one driver zero humorous humorous witty witty"),
    ("v07", "A hatchback hydroplaned through standing water and spun.", "the spin the spray dramatic dramatic emotional emotional"),
    ("v08", "Traffic merged calmly around a stalled car.", "stalled car handled minimalist minimalist calm calm"),
    ("v09", "A school bus stopped and several cars failed to halt.", "do better near buses persuasive persuasive serious serious"),
    ("v10", "A van drifted out of its lane at dusk and corrected.", "dusk lane lines poetic poetic romantic romantic"),
]

records = [ds.CorpusRecord(video_id=v, summary=s, source_caption=c) for v, s, c in corpus]
bundle = mock_bundle(seed=0)

report = ds.build_records(records, k=8, m=2, providers=bundle)
print(f"built {len(report.records)} records ({len(report.failures)} failures)")

tagged = ds.split_dataset(report.records, (0.7, 0.2, 0.1), seed=0)
counts: dict[str, int] = {}
for r in tagged:
    counts[r.split] = counts.get(r.split, 0) + 1
print("split counts (records):", counts)

rows = ds.export_sft(tagged, cot_fraction=0.25, seed=0)
cot = [r for r in rows if r["is_cot"]]
print(f"exported {len(rows)} SFT triplets, {len(cot)} with chain-of-thought targets")
print()
print("one CoT target:")
print(cot[0]["target"])

out_dir = Path(tempfile.mkdtemp(prefix="tonecap-demo-"))
ds.write_dataset(tagged, out_dir / "dataset.jsonl")
ds.write_jsonl(rows, out_dir / "sft.jsonl")
print()
print("artifacts written to", out_dir)
