from __future__ import annotations

import json
import sys

import pytest

from tonecap.mock import MockProvider, mock_bundle
from tonecap.schema import StructuralControls, ToneProfile, default_inventory


def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    status = "PASS" if report.passed else "FAIL"
    sys.stderr.write(f"\n[{status}] acceptance: {name}\n")


@pytest.fixture(scope="session")
def inventory():
    return default_inventory()


@pytest.fixture()
def bundle():
    return mock_bundle(seed=0)


@pytest.fixture()
def mock_provider():
    return MockProvider(seed=0)


SUMMARY = (
    "A dashcam video captured a near miss incident involving dangerous and careless driving "
    "in a busy city street. A car pulled out from a side road without leaving sufficient space, "
    "nearly hitting a cyclist. The driver failed to yield right of way and the cyclist braked hard."
)


@pytest.fixture(scope="session")
def summary():
    return SUMMARY


@pytest.fixture()
def sample_target():
    return ToneProfile(
        personality={"Anxious": 0.8, "Angry": 0.4, "Emotional": 0.5},
        writing_style={"Exaggeration": 0.5, "Judgemental": 0.25, "Conversational": 0.75},
        structural=StructuralControls(
            informativeness=0.4,
            word_count=17,
            hashtags=True,
            emojis=True,
            user_mentions=False,
            location=False,
            date_time=False,
            first_person=True,
        ),
        role="target",
    )


# A 10-video corpus whose captions carry the mock extractor's attribute-name
# tokens, so neighbor tone profiles come out diverse and non-empty.
_CORPUS_SPEC = [
    ("v001", "A truck overturned on the highway ramp spilling gravel across two lanes during rush hour.",
     "cant believe this gravel chaos conversational conversational conversational anxious anxious anxious #fail 😱"),
    ("v002", "A sedan ran a red light at a junction and clipped a delivery van turning left.",
     "sedan ran the red light and clipped a van factual factual factual factual"),
    ("v003", "A cyclist swerved to avoid a suddenly opened car door on a narrow street.",
     "watch for opened doors friends advisory advisory advisory caring caring please stay safe"),
    ("v004", "A motorcycle weaved between cars at high speed and nearly rear-ended a bus.",
     "the most insane weaving ever exaggeration exaggeration exaggeration angry angry unbelievable stuff 🚨"),
    ("v005", "A pickup towing a trailer fishtailed on a wet curve and blocked the shoulder.",
     "towing that badly is simply reckless judgemental judgemental judgemental critical critical"),
    ("v006", "A driver reversed into a parking bollard twice while attempting to park.",
     "bollard one driver zero humorous humorous humorous witty witty lol"),
    ("v007", "A hatchback hydroplaned through standing water and spun across three lanes.",
     "the spin the spray the silence dramatic dramatic dramatic emotional emotional what a scene"),
    ("v008", "Traffic merged calmly around a stalled car while a tow truck arrived.",
     "stalled car handled minimalist minimalist calm calm all fine"),
    ("v009", "A school bus stopped with flashing lights and several cars failed to halt.",
     "we must do better around school buses persuasive persuasive persuasive serious serious"),
    ("v010", "A van drifted out of its lane at dusk and corrected after rumble strips.",
     "dusk light long lane lines poetic poetic poetic romantic romantic drifting home"),
]


@pytest.fixture(scope="session")
def corpus_rows():
    return [
        {"video_id": vid, "summary": s, "caption": c} for vid, s, c in _CORPUS_SPEC
    ]


@pytest.fixture()
def corpus_file(tmp_path, corpus_rows):
    path = tmp_path / "corpus.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for row in corpus_rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    return path
