"""The sole boundary to external model services.

Chat-completion and embedding clients speak the OpenAI-compatible JSON wire
protocol over HTTP. Everything above this module depends only on the
``ChatProvider`` / ``EmbeddingProvider`` protocols, never on a concrete
endpoint; the deterministic stand-in lives in ``tonecap.mock``.
"""

from __future__ import annotations

import json
import os
import random
import threading
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Protocol, Sequence, runtime_checkable

import httpx

from .errors import (
    AuthError,
    ParseError,
    RangeError,
    RateLimited,
    SchemaError,
    Timeout,
    TransportError,
    UnknownAttribute,
    UpstreamError,
)


@dataclass(frozen=True)
class ChatRequest:
    model: str
    messages: tuple[tuple[str, str], ...]  # (role, content)
    temperature: float = 0.7
    top_p: float = 1.0
    max_tokens: int = 1024
    response_format: str = "text"  # "text" | "json"

    def __post_init__(self) -> None:
        if not self.messages:
            raise SchemaError("message list must be non-empty")
        if self.temperature < 0:
            raise RangeError("temperature", self.temperature, ">= 0")

    def prompt_text(self) -> str:
        """All message contents, flattened; this is what mocks key on."""
        return "\n\n".join(content for _, content in self.messages)


@dataclass(frozen=True)
class ChatResponse:
    text: str
    model: str = ""
    usage: dict = field(default_factory=dict)


@runtime_checkable
class ChatProvider(Protocol):
    def chat(self, request: ChatRequest) -> ChatResponse: ...


@runtime_checkable
class EmbeddingProvider(Protocol):
    def embed(self, texts: Sequence[str]) -> list[list[float]]: ...


@dataclass(frozen=True)
class ProviderConfig:
    base_url: str = "https://api.openai.com/v1"
    api_key_env: str = "OPENAI_API_KEY"
    timeout: float = 60.0
    max_attempts: int = 4
    backoff_base: float = 0.5
    backoff_cap: float = 8.0
    jitter: float = 0.25
    rate_limit: tuple[int, float] | None = None  # (requests, per seconds)
    embed_model: str = "text-embedding-3-small"
    embed_batch: int = 64

    def __post_init__(self) -> None:
        if self.max_attempts < 1:
            raise RangeError("max_attempts", self.max_attempts, ">= 1")
        if self.timeout <= 0:
            raise RangeError("timeout", self.timeout, "> 0")


class TokenBucket:
    """Client-side request throttle; thread-safe."""

    def __init__(self, capacity: int, per_seconds: float, clock: Callable[[], float] = time.monotonic,
                 sleep: Callable[[float], None] = time.sleep):
        self.capacity = max(1, capacity)
        self.per_seconds = per_seconds
        self._tokens = float(self.capacity)
        self._stamp = clock()
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self._clock()
                self._tokens = min(
                    float(self.capacity),
                    self._tokens + (now - self._stamp) * self.capacity / self.per_seconds,
                )
                self._stamp = now
                if self._tokens >= 1.0:
                    self._tokens -= 1.0
                    return
                needed = (1.0 - self._tokens) * self.per_seconds / self.capacity
            self._sleep(needed)


class HttpProvider:
    """OpenAI-compatible chat + embedding client with retry/backoff.

    Transport failures and 429/5xx responses are retried with exponential
    backoff and jitter up to ``max_attempts``; other 4xx responses are never
    retried. Completions are idempotent, so retries cannot duplicate effects.
    """

    def __init__(self, config: ProviderConfig, *, transport: httpx.BaseTransport | None = None,
                 sleep: Callable[[float], None] = time.sleep, rng: random.Random | None = None):
        self.config = config
        self._client = httpx.Client(base_url=config.base_url, timeout=config.timeout, transport=transport)
        self._sleep = sleep
        self._rng = rng or random.Random()
        self._bucket = (
            TokenBucket(config.rate_limit[0], config.rate_limit[1], sleep=sleep)
            if config.rate_limit
            else None
        )

    def _api_key(self) -> str:
        key = os.environ.get(self.config.api_key_env, "")
        if not key:
            raise AuthError(
                f"missing API key: set the {self.config.api_key_env} environment variable"
            )
        return key

    def _post(self, path: str, payload: dict) -> dict:
        headers = {"Authorization": f"Bearer {self._api_key()}"}
        last: Exception | None = None
        for attempt in range(self.config.max_attempts):
            if self._bucket:
                self._bucket.acquire()
            try:
                resp = self._client.post(path, json=payload, headers=headers)
            except httpx.TimeoutException as e:
                last = Timeout(str(e))
            except httpx.HTTPError as e:
                last = TransportError(str(e))
            else:
                if resp.status_code == 200:
                    return resp.json()
                if resp.status_code in (401, 403):
                    raise AuthError(f"endpoint rejected credentials ({resp.status_code})")
                if resp.status_code == 429:
                    last = RateLimited(resp.text[:200])
                elif resp.status_code >= 500:
                    last = UpstreamError(resp.status_code, resp.text[:200])
                else:
                    raise UpstreamError(resp.status_code, resp.text[:200])
            if attempt + 1 < self.config.max_attempts:
                delay = min(self.config.backoff_cap, self.config.backoff_base * (2**attempt))
                delay += self._rng.uniform(0, self.config.jitter)
                self._sleep(delay)
        assert last is not None
        raise last

    def chat(self, request: ChatRequest) -> ChatResponse:
        payload: dict[str, Any] = {
            "model": request.model,
            "messages": [{"role": r, "content": c} for r, c in request.messages],
            "temperature": request.temperature,
            "top_p": request.top_p,
            "max_tokens": request.max_tokens,
        }
        if request.response_format == "json":
            payload["response_format"] = {"type": "json_object"}
        data = self._post("/chat/completions", payload)
        try:
            text = data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as e:
            raise UpstreamError(200, f"malformed completion body: {e}") from e
        return ChatResponse(text=text or "", model=data.get("model", request.model),
                            usage=data.get("usage", {}) or {})

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        out: list[list[float]] = []
        batch = max(1, self.config.embed_batch)
        for i in range(0, len(texts), batch):
            chunk = list(texts[i : i + batch])
            data = self._post("/embeddings", {"model": self.config.embed_model, "input": chunk})
            try:
                rows = sorted(data["data"], key=lambda r: r["index"])
                out.extend([list(map(float, r["embedding"])) for r in rows])
            except (KeyError, TypeError) as e:
                raise UpstreamError(200, f"malformed embedding body: {e}") from e
        return out


@dataclass
class ProviderBundle:
    """The providers each pipeline role talks to (may all be the same object)."""

    generation: ChatProvider
    extraction: ChatProvider
    judge: ChatProvider
    embedding: EmbeddingProvider


def load_provider_config(path: str) -> ProviderBundle:
    """Build a bundle from a JSON config file.

    Format::

        {"providers": {"name": {"base_url": ..., "api_key_env": ..., ...}},
         "roles": {"generation": "name", "extraction": "name",
                   "judge": "name", "embedding": "name"}}
    """
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or "providers" not in data or "roles" not in data:
        raise SchemaError("provider config needs 'providers' and 'roles' objects", name=path)
    built: dict[str, HttpProvider] = {}
    for name, raw in data["providers"].items():
        known = {f for f in ProviderConfig.__dataclass_fields__}
        cfg_kwargs = {k: v for k, v in raw.items() if k in known}
        if "rate_limit" in cfg_kwargs and cfg_kwargs["rate_limit"] is not None:
            cfg_kwargs["rate_limit"] = tuple(cfg_kwargs["rate_limit"])
        built[name] = HttpProvider(ProviderConfig(**cfg_kwargs))
    roles = data["roles"]
    try:
        return ProviderBundle(
            generation=built[roles["generation"]],
            extraction=built[roles["extraction"]],
            judge=built[roles["judge"]],
            embedding=built[roles["embedding"]],
        )
    except KeyError as e:
        raise SchemaError(f"provider config role references unknown provider: {e}", name=path) from e


_REPAIR_INSTRUCTION = (
    "The previous reply was not valid JSON matching the requested schema. "
    "Reply again with only the corrected JSON object."
)


def chat_json(
    provider: ChatProvider,
    *,
    model: str,
    prompt: str,
    validate: Callable[[Any], Any],
    temperature: float = 0.0,
    top_p: float = 1.0,
    max_tokens: int = 512,
) -> Any:
    """One completion parsed as strict JSON, with a single repair retry.

    ``validate`` receives the decoded object and either returns the final
    value or raises (ValueError/SchemaError/...). Any decode or validation
    failure triggers exactly one repair round-trip; a second failure raises
    ParseError. Scores are never silently defaulted.
    """
    messages: tuple[tuple[str, str], ...] = (("user", prompt),)
    raw = ""
    for attempt in range(2):
        req = ChatRequest(
            model=model,
            messages=messages,
            temperature=temperature,
            top_p=top_p,
            max_tokens=max_tokens,
            response_format="json",
        )
        raw = provider.chat(req).text
        try:
            obj = json.loads(_strip_fences(raw))
            return validate(obj)
        except (json.JSONDecodeError, ValueError, KeyError, TypeError,
                SchemaError, RangeError, UnknownAttribute) as e:
            if attempt == 0:
                messages = messages + (("assistant", raw), ("user", _REPAIR_INSTRUCTION))
                continue
            raise ParseError(f"provider response failed validation after repair retry: {e}", raw=raw) from e


def _strip_fences(text: str) -> str:
    t = text.strip()
    if t.startswith("```"):
        t = t.split("\n", 1)[1] if "\n" in t else ""
        if t.rstrip().endswith("```"):
            t = t.rstrip()[: -3]
    return t.strip()
