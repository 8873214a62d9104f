"""HTTP API over extraction, generation, and scoring.

Stateless between requests except provider-level caches; with the
deterministic mock providers, identical request bodies produce identical
response bodies. No auth in v1 (single-user tool behind a trusted origin) —
do not expose this service publicly without a proxy in front.

Error envelope: {"code", "message", "component"} with code from ERROR_CODES.
"""

from __future__ import annotations

from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .errors import (
    ParseError,
    ProviderError,
    RangeError,
    SchemaError,
    ToneCapError,
    UnknownAttribute,
)
from .extraction import ExtractionConfig, extract_tone_profile
from .generation import GenerationConfig, generate_tone_caption
from .metrics import JudgeConfig, score_caption
from .mock import mock_bundle
from .providers import ProviderBundle
from .schema import AttributeInventory, default_inventory, profile_from_wire, profile_to_wire

ERROR_CODES = (
    "schema_error",
    "unknown_attribute",
    "range_error",
    "provider_error",
    "parse_error",
    "internal",
)


class ExtractBody(BaseModel):
    caption: str
    summary: str


class GenerateBody(BaseModel):
    summary: str
    spec: dict
    mode: str = "two_stage"
    n: int | None = Field(default=None, ge=1)


class ScoreBody(BaseModel):
    caption: str
    summary: str
    spec: dict


def _error(status: int, code: str, message: str, component: str) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "component": component},
    )


def create_app(
    *,
    providers: ProviderBundle | None = None,
    inventory: AttributeInventory | None = None,
    extraction_cfg: ExtractionConfig | None = None,
    judge_cfg: JudgeConfig | None = None,
    gen_cfg: GenerationConfig | None = None,
) -> FastAPI:
    """Build the service app. Defaults to the deterministic mock providers."""
    inv = inventory or default_inventory()
    bundle = providers or mock_bundle(inventory=inv)
    ex_cfg = extraction_cfg or ExtractionConfig()
    j_cfg = judge_cfg or JudgeConfig()
    g_cfg = gen_cfg or GenerationConfig()

    app = FastAPI(title="tonecap service", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def _on_validation(_request: Request, exc: RequestValidationError) -> JSONResponse:
        return _error(400, "schema_error", str(exc.errors()[:3]), "service")

    @app.exception_handler(ToneCapError)
    async def _on_tonecap(_request: Request, exc: ToneCapError) -> JSONResponse:
        return _map_error(exc)

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.get("/api/inventory")
    def get_inventory() -> dict:
        return inv.to_dict()

    @app.post("/api/extract")
    def post_extract(body: ExtractBody) -> Any:
        try:
            profile = extract_tone_profile(body.caption, body.summary, ex_cfg, bundle.extraction, inv)
        except ToneCapError as e:
            return _map_error(e, component="extraction")
        return profile_to_wire(profile)

    @app.post("/api/score")
    def post_score(body: ScoreBody) -> Any:
        try:
            target = profile_from_wire(body.spec, role="target")
            scored = score_caption(
                body.caption,
                body.summary,
                target,
                extraction_cfg=ex_cfg,
                judge_cfg=j_cfg,
                providers=bundle,
                inventory=inv,
            )
        except ToneCapError as e:
            return _map_error(e, component="metrics")
        return {"report": scored.report.to_dict(), "extracted": profile_to_wire(scored.extracted)}

    @app.post("/api/generate")
    def post_generate(body: GenerateBody) -> Any:
        try:
            target = profile_from_wire(body.spec, role="target")
            cfg_kwargs = {"mode": body.mode}
            if body.n is not None:
                cfg_kwargs["n"] = body.n
            cfg = GenerationConfig(
                model=g_cfg.model,
                temperature=g_cfg.temperature,
                top_p=g_cfg.top_p,
                max_tokens=g_cfg.max_tokens,
                fc_floor=g_cfg.fc_floor,
                template_dir=g_cfg.template_dir,
                **cfg_kwargs,
            )
            outcome = generate_tone_caption(
                body.summary,
                target,
                cfg,
                bundle,
                extraction_cfg=ex_cfg,
                judge_cfg=j_cfg,
                inventory=inv,
            )
        except ToneCapError as e:
            return _map_error(e, component="generation")
        stage_texts = {s.stage: s.best.text for s in outcome.stages}
        return {
            "final": outcome.final.text,
            "stage1": stage_texts.get(1),
            "stage2": stage_texts.get(2),
            "scores": outcome.final.report.to_dict(),
            "provenance": outcome.to_dict(),
        }

    return app


def _map_error(exc: ToneCapError, component: str = "service") -> JSONResponse:
    from .errors import ExtractionError

    if isinstance(exc, ExtractionError):
        inner = _map_error(exc.cause, component=f"{component}:step{exc.step}") \
            if isinstance(exc.cause, ToneCapError) else _error(502, "provider_error", str(exc), component)
        return inner
    if isinstance(exc, UnknownAttribute):
        return _error(400, "unknown_attribute", str(exc), component)
    if isinstance(exc, RangeError):
        return _error(400, "range_error", str(exc), component)
    if isinstance(exc, ParseError):
        return _error(502, "parse_error", str(exc), component)
    if isinstance(exc, ProviderError):
        return _error(502, "provider_error", str(exc), component)
    if isinstance(exc, SchemaError):
        return _error(400, "schema_error", str(exc), component)
    return _error(400, "schema_error", str(exc), component)


def run_service(host: str = "127.0.0.1", port: int = 8787, **kwargs: Any) -> None:
    """Blocking uvicorn runner for the CLI `serve` command."""
    import uvicorn

    uvicorn.run(create_app(**kwargs), host=host, port=port, log_level="warning")
