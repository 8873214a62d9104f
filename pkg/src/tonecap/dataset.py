"""Corpus ingestion, per-video dataset building, splits, SFT export, benchmark.

The per-video flow: embed every summary once, retrieve each video's k nearest
neighbors, extract tone profiles from the neighbors' captions (memoized),
pick the m profiles most distinct from the video's own tone, and run the
staged generator once per selected profile. Each produced record stores the
tone profile extracted from the *final* caption (not the generation target),
both stage captions, and the per-stage score reports.

Per-video failures are collected into the build report and the build
continues; a single provider hiccup must not void a long run.
"""

from __future__ import annotations

import json
import math
import random
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import (
    MissingProvenance,
    NotEnoughCandidates,
    RatioError,
    RowMismatch,
    SchemaError,
)
from .extraction import ExtractionConfig, extract_tone_profile
from .generation import GenerationConfig, GenerationOutcome, generate_tone_caption
from .metrics import JudgeConfig, ScoreReport, score_caption
from .providers import ProviderBundle
from .retrieval import build_index, knn_neighbors, select_distinct_tones
from .schema import (
    AttributeInventory,
    StructuralControls,
    ToneProfile,
    default_inventory,
    profile_from_wire,
    profile_to_json,
    profile_to_wire,
)
from .templates import binding_rules_block, cot_instruction, instruction_templates

SPLITS = ("train", "val", "eval")


@dataclass(frozen=True)
class CorpusRecord:
    video_id: str
    summary: str
    source_caption: str | None = None
    meta: Mapping = field(default_factory=dict)


def ingest_corpus(path: str | Path) -> list[CorpusRecord]:
    """Read a JSONL corpus of {"video_id", "summary", "caption"?} rows."""
    records: list[CorpusRecord] = []
    seen: set[str] = set()
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as e:
        raise SchemaError(f"cannot read corpus: {e}", name=str(path)) from e
    with fh:
        for i, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise SchemaError(f"corpus line is not valid JSON: {e}", line=i) from e
            if not isinstance(obj, dict):
                raise SchemaError("corpus line must be a JSON object", line=i)
            vid = obj.get("video_id")
            summary = obj.get("summary")
            if not isinstance(vid, str) or not vid:
                raise SchemaError("missing or empty 'video_id'", line=i)
            if not isinstance(summary, str) or not summary.strip():
                raise SchemaError("missing or empty 'summary'", line=i)
            if vid in seen:
                raise SchemaError(f"duplicate video_id {vid!r}", line=i)
            seen.add(vid)
            caption = obj.get("caption")
            if caption is not None and not isinstance(caption, str):
                raise SchemaError("'caption' must be a string when present", line=i)
            meta = obj.get("meta", {})
            records.append(CorpusRecord(video_id=vid, summary=summary, source_caption=caption, meta=meta))
    return records


@dataclass(frozen=True)
class DatasetRecord:
    """One tone-controlled caption variant for one video.

    ``profile`` is the tone extracted from the final caption; the original
    generation target is only used to drive generation. ``summary`` and
    provenance fields beyond the core schema are retained because the SFT
    export needs them.
    """

    video_id: str
    variant: int
    source_neighbor: str
    summary: str
    profile: ToneProfile
    final_caption: str
    stage1_caption: str | None
    stage2_caption: str | None
    selected_stage: int
    stage_reports: Mapping[str, ScoreReport]
    final_report: ScoreReport
    split: str = ""

    def to_dict(self) -> dict:
        return {
            "video_id": self.video_id,
            "variant": self.variant,
            "source_neighbor": self.source_neighbor,
            "summary": self.summary,
            "profile": profile_to_wire(self.profile),
            "final_caption": self.final_caption,
            "stage1_caption": self.stage1_caption,
            "stage2_caption": self.stage2_caption,
            "selected_stage": self.selected_stage,
            "stage_reports": {k: r.to_dict() for k, r in sorted(self.stage_reports.items())},
            "final_report": self.final_report.to_dict(),
            "split": self.split,
        }

    @classmethod
    def from_dict(cls, obj: Mapping) -> "DatasetRecord":
        return cls(
            video_id=obj["video_id"],
            variant=int(obj["variant"]),
            source_neighbor=obj.get("source_neighbor", ""),
            summary=obj["summary"],
            profile=profile_from_wire(obj["profile"], role="extracted"),
            final_caption=obj["final_caption"],
            stage1_caption=obj.get("stage1_caption"),
            stage2_caption=obj.get("stage2_caption"),
            selected_stage=int(obj.get("selected_stage", 1)),
            stage_reports={k: ScoreReport.from_dict(v) for k, v in obj.get("stage_reports", {}).items()},
            final_report=ScoreReport.from_dict(obj["final_report"]),
            split=obj.get("split", ""),
        )

    def tagged(self, split: str) -> "DatasetRecord":
        if split not in SPLITS:
            raise RatioError(f"split must be one of {SPLITS}")
        return DatasetRecord(
            video_id=self.video_id,
            variant=self.variant,
            source_neighbor=self.source_neighbor,
            summary=self.summary,
            profile=self.profile,
            final_caption=self.final_caption,
            stage1_caption=self.stage1_caption,
            stage2_caption=self.stage2_caption,
            selected_stage=self.selected_stage,
            stage_reports=dict(self.stage_reports),
            final_report=self.final_report,
            split=split,
        )


@dataclass
class BuildReport:
    records: list[DatasetRecord]
    failures: list[dict]

    def to_dict(self) -> dict:
        return {
            "records": len(self.records),
            "videos_failed": len(self.failures),
            "failures": self.failures,
        }


def build_records(
    corpus: Sequence[CorpusRecord],
    k: int = 8,
    m: int = 3,
    *,
    extraction_cfg: ExtractionConfig | None = None,
    judge_cfg: JudgeConfig | None = None,
    gen_cfg: GenerationConfig | None = None,
    providers: ProviderBundle,
    inventory: AttributeInventory | None = None,
    parallel: int = 1,
) -> BuildReport:
    """Run the full per-video pipeline over a corpus (skip-and-log on error)."""
    if len(corpus) <= k:
        raise SchemaError(f"corpus size ({len(corpus)}) must exceed k ({k})")
    inv = inventory or default_inventory()
    extraction_cfg = extraction_cfg or ExtractionConfig()
    judge_cfg = judge_cfg or JudgeConfig()
    gen_cfg = gen_cfg or GenerationConfig()

    by_id = {r.video_id: r for r in corpus}
    index = build_index({r.video_id: r.summary for r in corpus}, providers.embedding)

    profile_cache: dict[tuple[str, str], ToneProfile] = {}

    def tx(caption: str, summary: str) -> ToneProfile:
        key = (caption, summary)
        if key not in profile_cache:
            profile_cache[key] = extract_tone_profile(caption, summary, extraction_cfg, providers.extraction, inv)
        return profile_cache[key]

    def one_video(record: CorpusRecord) -> list[DatasetRecord]:
        neighbors = knn_neighbors(record.video_id, index, k)
        pool: list[tuple[str, ToneProfile]] = []
        for nid, _sim in neighbors.neighbors:
            neighbor = by_id[nid]
            if neighbor.source_caption:
                pool.append((nid, tx(neighbor.source_caption, neighbor.summary)))
        if len(pool) < m:
            raise NotEnoughCandidates(
                f"{record.video_id}: only {len(pool)} captioned neighbors for m={m}"
            )
        if record.source_caption:
            t_ref = tx(record.source_caption, record.summary)
        else:
            t_ref = ToneProfile(
                personality={},
                writing_style={},
                structural=StructuralControls(informativeness=0.5, word_count=max(1, len(record.summary.split()))),
                role="extracted",
            )
        selected = select_distinct_tones(t_ref, pool, m)
        out: list[DatasetRecord] = []
        for variant, (nid, profile) in enumerate(selected):
            target = profile.with_role("target")
            outcome = generate_tone_caption(
                record.summary,
                target,
                gen_cfg,
                providers,
                extraction_cfg=extraction_cfg,
                judge_cfg=judge_cfg,
                inventory=inv,
            )
            out.append(_record_from_outcome(record, variant, nid, outcome))
        return out

    records: list[DatasetRecord] = []
    failures: list[dict] = []
    ordered = sorted(corpus, key=lambda r: r.video_id)

    def safe(record: CorpusRecord) -> tuple[str, list[DatasetRecord] | None, str | None]:
        try:
            return record.video_id, one_video(record), None
        except Exception as e:
            return record.video_id, None, f"{type(e).__name__}: {e}"

    if parallel > 1:
        with ThreadPoolExecutor(max_workers=parallel) as pool_exec:
            results = list(pool_exec.map(safe, ordered))
    else:
        results = [safe(r) for r in ordered]

    # drain in video_id order so the artifact is deterministic
    for video_id, recs, err in sorted(results, key=lambda t: t[0]):
        if err is not None:
            failures.append({"video_id": video_id, "error": err})
        else:
            records.extend(recs or [])
    return BuildReport(records=records, failures=failures)


def _record_from_outcome(
    record: CorpusRecord, variant: int, neighbor_id: str, outcome: GenerationOutcome
) -> DatasetRecord:
    stage_reports = {f"stage{s.stage}": s.best.report for s in outcome.stages}
    stage_texts = {s.stage: s.best.text for s in outcome.stages}
    return DatasetRecord(
        video_id=record.video_id,
        variant=variant,
        source_neighbor=neighbor_id,
        summary=record.summary,
        profile=outcome.final.profile,  # TX(final caption)
        final_caption=outcome.final.text,
        stage1_caption=stage_texts.get(1),
        stage2_caption=stage_texts.get(2),
        selected_stage=outcome.final.stage,
        stage_reports=stage_reports,
        final_report=outcome.final.report,
        split="",
    )


def write_dataset(records: Iterable[DatasetRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r.to_dict(), ensure_ascii=False) + "\n")


def load_dataset(path: str | Path) -> list[DatasetRecord]:
    out: list[DatasetRecord] = []
    with open(path, "r", encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(DatasetRecord.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError) as e:
                raise SchemaError(f"bad dataset line: {e}", line=i) from e
    return out


# ---------------------------------------------------------------------------
# Splits


def split_dataset(
    records: Sequence[DatasetRecord],
    ratios: tuple[float, float, float] = (0.7, 0.2, 0.1),
    seed: int = 0,
) -> list[DatasetRecord]:
    """Tag records train/val/eval at video granularity, deterministically.

    All records of one video share a tag; the three video sets are pairwise
    disjoint by construction. Video counts follow the ratios via largest
    remainder, so exact proportions are hit whenever they divide evenly.
    """
    if len(ratios) != 3:
        raise RatioError("need exactly three ratios (train, val, eval)")
    if any(r < 0 for r in ratios):
        raise RatioError("ratios must be non-negative")
    if not math.isclose(sum(ratios), 1.0, abs_tol=1e-9):
        raise RatioError(f"ratios must sum to 1, got {sum(ratios)}")

    videos = sorted({r.video_id for r in records})
    rng = random.Random(seed)
    rng.shuffle(videos)

    n = len(videos)
    raw = [r * n for r in ratios]
    counts = [int(x) for x in raw]
    remainder = n - sum(counts)
    by_frac = sorted(range(3), key=lambda i: (-(raw[i] - counts[i]), i))
    for i in range(remainder):
        counts[by_frac[i % 3]] += 1

    tag_of: dict[str, str] = {}
    pos = 0
    for split, count in zip(SPLITS, counts):
        for vid in videos[pos : pos + count]:
            tag_of[vid] = split
        pos += count
    return [r.tagged(tag_of[r.video_id]) for r in records]


# ---------------------------------------------------------------------------
# SFT export

_COT_TARGET_RE = re.compile(
    r"\A\[FINAL\]\n(.*?)\n\[/FINAL\]\n\[REASONING\]\n(.*?)\n\[/REASONING\]\Z", re.S
)


def build_cot_target(record: DatasetRecord) -> str:
    """Four-part rationale plus the tagged final caption."""
    if not record.stage1_caption:
        raise MissingProvenance(f"{record.video_id}: record lacks a stage-1 caption")
    if not record.stage2_caption:
        raise MissingProvenance(f"{record.video_id}: record lacks a stage-2 caption")
    if record.selected_stage == 2:
        selection = (
            "Selection: The third step candidate best satisfies the provided personality, "
            "writing style and structural controls; returning it as final."
        )
    else:
        selection = (
            "Selection: The second step candidate best satisfies the provided writing style "
            "and structural controls; returning it as final."
        )
    reasoning = "\n".join(
        [
            f"1) Key Event summary: {record.summary}",
            "2) Caption with Writing style and structure applied (informativeness, "
            f"word_count, binary toggles): {record.stage1_caption}",
            "3) Caption with Personality traits refined (preserving writing style and "
            f"structural controls): {record.stage2_caption}",
            selection,
        ]
    )
    return f"[FINAL]\n{record.final_caption}\n[/FINAL]\n[REASONING]\n{reasoning}\n[/REASONING]"


def parse_cot_target(text: str) -> tuple[str, str]:
    """Split a CoT target into (final caption, reasoning); strict grammar."""
    match = _COT_TARGET_RE.match(text)
    if not match:
        raise SchemaError("target does not match the [FINAL]/[REASONING] grammar")
    return match.group(1), match.group(2)


def build_instruction(record: DatasetRecord, rng: random.Random, is_cot: bool,
                      template_dir: str | None = None) -> str:
    """Sampled task template + binding rules with the serialized spec (+ CoT ask)."""
    caption_templates, _ = instruction_templates()
    template = rng.choice(caption_templates)
    spec_json = profile_to_json(record.profile)
    parts = [template, binding_rules_block(spec_json, template_dir)]
    if is_cot:
        parts.append(cot_instruction(template_dir))
    return " ".join(parts)


def export_sft(
    records: Sequence[DatasetRecord],
    cot_fraction: float = 0.25,
    seed: int = 0,
    include_summaries: bool = True,
    template_dir: str | None = None,
) -> list[dict]:
    """Instruction-tuning triplets as JSONL-ready dicts.

    CoT targets are interleaved deterministically so exactly
    floor(N * cot_fraction) of the N caption triplets are CoT. Auxiliary
    summarization triplets (one per distinct video) are appended when
    ``include_summaries`` is set; they never count toward the CoT ratio.
    """
    if not (0.0 <= cot_fraction <= 1.0):
        raise RatioError(f"cot_fraction must be in [0, 1], got {cot_fraction}")
    rng = random.Random(seed)
    out: list[dict] = []
    acc_prev = 0
    for i, record in enumerate(records):
        acc_now = math.floor((i + 1) * cot_fraction)
        is_cot = acc_now > acc_prev
        acc_prev = acc_now
        instruction = build_instruction(record, rng, is_cot, template_dir)
        target = build_cot_target(record) if is_cot else record.final_caption
        out.append(
            {
                "instruction": instruction,
                "target": target,
                "is_cot": is_cot,
                "video_id": record.video_id,
            }
        )
    if include_summaries:
        _, summary_templates = instruction_templates()
        seen: set[str] = set()
        for record in records:
            if record.video_id in seen:
                continue
            seen.add(record.video_id)
            out.append(
                {
                    "instruction": rng.choice(summary_templates),
                    "target": record.summary,
                    "is_cot": False,
                    "video_id": record.video_id,
                }
            )
    return out


def write_jsonl(rows: Iterable[Mapping], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def read_jsonl(path: str | Path) -> list[dict]:
    out: list[dict] = []
    with open(path, "r", encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as e:
                raise SchemaError(f"bad JSONL line: {e}", line=i) from e
    return out


# ---------------------------------------------------------------------------
# Zero-shot benchmark harness

LEADERBOARD_COLUMNS = ("P", "WS", "NAS", "A", "I", "wc", "SAS", "TAS", "FC", "Overall")


@dataclass
class Leaderboard:
    rows: list[dict]  # {"video_id": ..., "report": ScoreReport}
    means: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "rows": [
                {"video_id": r["video_id"], "report": r["report"].to_dict()} for r in self.rows
            ],
            "means": self.means,
        }

    def render_table(self, name: str = "candidates") -> str:
        header = f"{'model':<24}" + "".join(f"{c:>9}" for c in LEADERBOARD_COLUMNS)
        line = f"{name:<24}" + "".join(f"{self.means[c]:>9.1f}" for c in LEADERBOARD_COLUMNS)
        return header + "\n" + "-" * len(header) + "\n" + line


def _column_values(report: ScoreReport) -> dict[str, float]:
    attr_acc = 1.0 - sum(report.attr_errors.values()) / max(1, len(report.attr_errors))
    return {
        "P": (report.s_p if report.s_p is not None else 0.0) * 100.0,
        "WS": (report.s_w if report.s_w is not None else 0.0) * 100.0,
        "NAS": report.nas * 100.0,
        "A": attr_acc * 100.0,
        "I": (1.0 - report.e_i) * 100.0,
        "wc": (1.0 - report.e_len) * 100.0,
        "SAS": report.sas * 100.0,
        "TAS": report.tas * 100.0,
        "FC": report.fc * 100.0,
        "Overall": report.overall * 100.0,
    }


def bench_score(
    task_rows: Sequence[Mapping],
    candidate_rows: Sequence[Mapping],
    *,
    extraction_cfg: ExtractionConfig | None = None,
    judge_cfg: JudgeConfig | None = None,
    providers: ProviderBundle,
    inventory: AttributeInventory | None = None,
) -> Leaderboard:
    """Score one candidate caption per task row; rows pair up by position.

    Task rows: {"video_id", "summary", "spec"}; candidate rows: {"video_id",
    "caption"}. A count or video_id mismatch raises RowMismatch naming the
    offending video.
    """
    extraction_cfg = extraction_cfg or ExtractionConfig()
    judge_cfg = judge_cfg or JudgeConfig()
    inv = inventory or default_inventory()

    if len(candidate_rows) < len(task_rows):
        missing = task_rows[len(candidate_rows)].get("video_id", "?")
        raise RowMismatch(f"missing candidate row for video {missing!r}", video_id=str(missing))
    if len(candidate_rows) > len(task_rows):
        extra = candidate_rows[len(task_rows)].get("video_id", "?")
        raise RowMismatch(f"extra candidate row for video {extra!r}", video_id=str(extra))

    rows: list[dict] = []
    sums = {c: 0.0 for c in LEADERBOARD_COLUMNS}
    for task, cand in zip(task_rows, candidate_rows):
        vid = task.get("video_id")
        if cand.get("video_id") != vid:
            raise RowMismatch(
                f"candidate row video {cand.get('video_id')!r} does not match task row {vid!r}",
                video_id=str(vid),
            )
        if "caption" not in cand or not isinstance(cand["caption"], str):
            raise RowMismatch(f"candidate row for {vid!r} lacks a caption", video_id=str(vid))
        target = profile_from_wire(task["spec"], role="target")
        scored = score_caption(
            cand["caption"],
            task["summary"],
            target,
            extraction_cfg=extraction_cfg,
            judge_cfg=judge_cfg,
            providers=providers,
            inventory=inv,
        )
        rows.append({"video_id": vid, "report": scored.report})
        for col, value in _column_values(scored.report).items():
            sums[col] += value
    count = max(1, len(rows))
    means = {c: sums[c] / count for c in LEADERBOARD_COLUMNS}
    return Leaderboard(rows=rows, means=means)
