"""Operator CLI.

Every successful invocation prints machine-readable JSON (or JSONL) on stdout;
human-facing logs go to stderr. Exit codes: 0 success, 1 validation error,
2 provider/runtime error. The global ``--mock`` flag swaps every provider for
the deterministic mock — the hermetic-test and demo path.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from . import dataset as ds
from .errors import (
    AllCandidatesFailed,
    ProviderError,
    SchemaError,
    ToneCapError,
    VALIDATION_ERRORS,
)
from .extraction import (
    ExtractionConfig,
    StyleProposal,
    append_proposal,
    extract_tone_profile,
    load_proposals,
    propose_style_candidate,
)
from .generation import MODES, GenerationConfig, generate_tone_caption
from .metrics import JudgeConfig, score_caption
from .mock import mock_bundle
from .providers import ProviderBundle, load_provider_config
from .retrieval import select_distinct_tones
from .schema import (
    default_inventory,
    load_inventory,
    profile_from_json,
    profile_to_wire,
)


@dataclass
class AppContext:
    mock: bool
    config_path: str | None
    inventory_path: str | None
    _bundle: ProviderBundle | None = None

    @property
    def inventory(self):
        return load_inventory(self.inventory_path) if self.inventory_path else default_inventory()

    @property
    def providers(self) -> ProviderBundle:
        if self._bundle is None:
            if self.mock or not self.config_path:
                if not self.mock:
                    click.echo("note: no --config given, using the deterministic mock providers", err=True)
                self._bundle = mock_bundle(inventory=self.inventory)
            else:
                self._bundle = load_provider_config(self.config_path)
        return self._bundle


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Provider config JSON (providers by name + role map).")
@click.option("--mock", is_flag=True, help="Use the deterministic mock providers everywhere.")
@click.option("--inventory", "inventory_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Override the packaged attribute inventory.")
@click.pass_context
def cli(ctx: click.Context, config_path: str | None, mock: bool, inventory_path: str | None) -> None:
    """Tone-controllable captioning pipeline."""
    ctx.obj = AppContext(mock=mock, config_path=config_path, inventory_path=inventory_path)


def _read(path: str) -> str:
    return Path(path).read_text("utf-8").strip()


def _emit(obj) -> None:
    click.echo(json.dumps(obj, ensure_ascii=False))


@cli.command()
@click.option("--caption-file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--summary-file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def extract(app: AppContext, caption_file: str, summary_file: str) -> None:
    """Extract a tone profile from a caption + neutral summary."""
    profile = extract_tone_profile(
        _read(caption_file), _read(summary_file), ExtractionConfig(), app.providers.extraction, app.inventory
    )
    _emit(profile_to_wire(profile))


@cli.command()
@click.option("--summary-file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--spec-file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(MODES), default="two_stage", show_default=True)
@click.option("--n", type=int, default=2, show_default=True, help="Candidates per stage.")
@click.pass_obj
def generate(app: AppContext, summary_file: str, spec_file: str, mode: str, n: int) -> None:
    """Generate a tone-controlled caption with full stage provenance."""
    target = profile_from_json(_read(spec_file), role="target")
    outcome = generate_tone_caption(
        _read(summary_file), target, GenerationConfig(mode=mode, n=n), app.providers, inventory=app.inventory
    )
    _emit(outcome.to_dict())


@cli.command()
@click.option("--caption-file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--summary-file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--spec", "spec_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def score(app: AppContext, caption_file: str, summary_file: str, spec_file: str) -> None:
    """Score one caption against a tone spec."""
    target = profile_from_json(_read(spec_file), role="target")
    scored = score_caption(
        _read(caption_file),
        _read(summary_file),
        target,
        extraction_cfg=ExtractionConfig(),
        judge_cfg=JudgeConfig(),
        providers=app.providers,
        inventory=app.inventory,
    )
    _emit({"report": scored.report.to_dict(), "extracted": profile_to_wire(scored.extracted)})


@cli.command("select-tones")
@click.option("--corpus", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--ref", required=True, help="Reference video id.")
@click.option("--k", type=int, default=8, show_default=True)
@click.option("--m", type=int, default=3, show_default=True)
@click.option("--index-out", type=click.Path(dir_okay=False), default=None,
              help="Persist the embedding index as JSONL.")
@click.pass_obj
def select_tones(app: AppContext, corpus: str, ref: str, k: int, m: int, index_out: str | None) -> None:
    """Pick the m most distinct neighbor tone profiles for a reference video."""
    from .retrieval import build_index, knn_neighbors, save_index

    records = ds.ingest_corpus(corpus)
    by_id = {r.video_id: r for r in records}
    if ref not in by_id:
        raise SchemaError(f"reference video {ref!r} not in corpus")
    index = build_index({r.video_id: r.summary for r in records}, app.providers.embedding)
    if index_out:
        save_index(index, index_out)
    neighbors = knn_neighbors(ref, index, k)
    cfg = ExtractionConfig()
    pool = []
    for nid, _sim in neighbors.neighbors:
        n_rec = by_id[nid]
        if n_rec.source_caption:
            pool.append(
                (nid, extract_tone_profile(n_rec.source_caption, n_rec.summary, cfg, app.providers.extraction, app.inventory))
            )
    ref_rec = by_id[ref]
    if not ref_rec.source_caption:
        raise SchemaError(f"reference video {ref!r} has no caption to extract a tone from")
    t_ref = extract_tone_profile(ref_rec.source_caption, ref_rec.summary, cfg, app.providers.extraction, app.inventory)
    selected = select_distinct_tones(t_ref, pool, m)
    _emit(
        {
            "reference": ref,
            "neighbors": [{"video_id": vid, "cosine": sim} for vid, sim in neighbors.neighbors],
            "selected": [{"video_id": vid, "profile": profile_to_wire(p)} for vid, p in selected],
        }
    )


@cli.command("build-dataset")
@click.option("--corpus", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--k", type=int, default=8, show_default=True)
@click.option("--m", type=int, default=3, show_default=True)
@click.option("--mode", type=click.Choice(MODES), default="two_stage", show_default=True)
@click.option("--n", type=int, default=2, show_default=True)
@click.option("--parallel", type=int, default=1, show_default=True)
@click.pass_obj
def build_dataset(app: AppContext, corpus: str, out: str, k: int, m: int, mode: str, n: int, parallel: int) -> None:
    """Run the full per-video pipeline and write the dataset JSONL."""
    records = ds.ingest_corpus(corpus)
    report = ds.build_records(
        records,
        k=k,
        m=m,
        gen_cfg=GenerationConfig(mode=mode, n=n),
        providers=app.providers,
        inventory=app.inventory,
        parallel=parallel,
    )
    ds.write_dataset(report.records, out)
    for failure in report.failures:
        click.echo(f"failed: {failure['video_id']}: {failure['error']}", err=True)
    _emit(report.to_dict())


@cli.command()
@click.option("--dataset", "dataset_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--ratios", default="0.7,0.2,0.1", show_default=True, help="train,val,eval")
@click.option("--seed", type=int, default=0, show_default=True)
def split(dataset_path: str, out: str, ratios: str, seed: int) -> None:
    """Tag dataset records train/val/eval at video granularity."""
    try:
        parts = tuple(float(x) for x in ratios.split(","))
    except ValueError as e:
        raise SchemaError(f"bad --ratios: {e}") from e
    records = ds.load_dataset(dataset_path)
    tagged = ds.split_dataset(records, parts, seed=seed)  # type: ignore[arg-type]
    ds.write_dataset(tagged, out)
    counts: dict[str, int] = {}
    for r in tagged:
        counts[r.split] = counts.get(r.split, 0) + 1
    _emit({"records": len(tagged), "by_split": counts})


@cli.command("export-sft")
@click.option("--dataset", "dataset_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--cot-fraction", type=float, default=0.25, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--summaries/--no-summaries", default=True, show_default=True,
              help="Also emit auxiliary summarization triplets.")
def export_sft(dataset_path: str, out: str, cot_fraction: float, seed: int, summaries: bool) -> None:
    """Export instruction-tuning triplets (CoT interleaved deterministically)."""
    records = ds.load_dataset(dataset_path)
    rows = ds.export_sft(records, cot_fraction=cot_fraction, seed=seed, include_summaries=summaries)
    ds.write_jsonl(rows, out)
    _emit(
        {
            "triplets": len(rows),
            "cot": sum(1 for r in rows if r["is_cot"]),
            "caption_triplets": len(records),
        }
    )


@cli.command()
@click.option("--specs", "specs_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Task rows: {'video_id','summary','spec'} per line.")
@click.option("--candidates", "candidates_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Candidate rows: {'video_id','caption'} per line.")
@click.pass_obj
def bench(app: AppContext, specs_path: str, candidates_path: str) -> None:
    """Score a candidate-caption file against a benchmark task file."""
    board = ds.bench_score(
        ds.read_jsonl(specs_path),
        ds.read_jsonl(candidates_path),
        providers=app.providers,
        inventory=app.inventory,
    )
    click.echo(board.render_table(Path(candidates_path).stem), err=True)
    _emit(board.to_dict())


@cli.group("review-styles")
def review_styles() -> None:
    """Review the writing-style proposal queue."""


@review_styles.command("propose")
@click.option("--caption-file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--summary-file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--queue", required=True, type=click.Path(dir_okay=False))
@click.pass_obj
def review_propose(app: AppContext, caption_file: str, summary_file: str, queue: str) -> None:
    """Extract styles; if none register, queue a new style proposal."""
    from .extraction import extract_writing_style

    cfg = ExtractionConfig()
    caption, summary = _read(caption_file), _read(summary_file)
    styles = extract_writing_style(caption, summary, cfg, app.providers.extraction, app.inventory)
    if any(v >= cfg.style_proposal_threshold for v in styles.values()):
        _emit({"proposed": False, "styles": styles})
        return
    proposal = propose_style_candidate(caption, summary, styles, cfg, app.providers.extraction, app.inventory)
    append_proposal(queue, proposal)
    _emit({"proposed": True, "proposal": proposal.to_dict()})


@review_styles.command("list")
@click.option("--queue", required=True, type=click.Path(exists=True, dir_okay=False))
def review_list(queue: str) -> None:
    _emit([p.to_dict() for p in load_proposals(queue)])


@review_styles.command("approve")
@click.option("--queue", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--name", required=True, help="Proposed style name to approve.")
@click.option("--inventory-file", required=True, type=click.Path(exists=True, dir_okay=False),
              help="User-writable inventory JSON to append the style to.")
def review_approve(queue: str, name: str, inventory_file: str) -> None:
    """Append an approved style to an inventory file and mark it approved."""
    proposals = load_proposals(queue)
    match = [p for p in proposals if p.proposed_style == name and p.status == "pending"]
    if not match:
        raise SchemaError(f"no pending proposal named {name!r} in queue")
    inv_data = json.loads(Path(inventory_file).read_text("utf-8"))
    existing = {s.lower() for s in inv_data.get("writing_styles", [])}
    if name.lower() in existing:
        raise SchemaError(f"style {name!r} already present in inventory")
    inv_data["writing_styles"] = list(inv_data.get("writing_styles", [])) + [name]
    Path(inventory_file).write_text(json.dumps(inv_data, indent=2, ensure_ascii=False) + "\n", "utf-8")
    updated = [
        StyleProposal(p.caption_id, p.proposed_style, p.rationale,
                      "approved" if (p.proposed_style == name and p.status == "pending") else p.status)
        for p in proposals
    ]
    Path(queue).write_text(
        "".join(json.dumps(p.to_dict(), ensure_ascii=False) + "\n" for p in updated), "utf-8"
    )
    _emit({"approved": name, "inventory": inventory_file})


@cli.command()
@click.option("--listen", default="127.0.0.1:8787", show_default=True, help="host:port")
@click.pass_obj
def serve(app: AppContext, listen: str) -> None:
    """Run the HTTP service (mock providers unless --config is given)."""
    from .service import run_service

    host, _, port = listen.rpartition(":")
    if not host or not port.isdigit():
        raise SchemaError("--listen must look like host:port")
    click.echo(f"listening on http://{host}:{port}", err=True)
    run_service(host=host, port=int(port), providers=app.providers, inventory=app.inventory)


def main(argv: list[str] | None = None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except VALIDATION_ERRORS as e:
        click.echo(f"error: {e}", err=True)
        return 1
    except (ProviderError, AllCandidatesFailed) as e:
        click.echo(f"provider error: {e}", err=True)
        return 2
    except ToneCapError as e:
        click.echo(f"error: {e}", err=True)
        return 2
    except click.ClickException as e:
        e.show(file=sys.stderr)
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
