from __future__ import annotations

import json

import httpx
import pytest

from tonecap.errors import (
    AuthError,
    ParseError,
    RangeError,
    SchemaError,
    UpstreamError,
)
from tonecap.providers import (
    ChatRequest,
    HttpProvider,
    ProviderConfig,
    TokenBucket,
    chat_json,
    load_provider_config,
)
from tonecap.mock import MockProvider


class TestChatRequest:
    def test_empty_messages_rejected(self):
        with pytest.raises(SchemaError):
            ChatRequest(model="m", messages=())

    def test_negative_temperature_rejected(self):
        with pytest.raises(RangeError):
            ChatRequest(model="m", messages=(("user", "hi"),), temperature=-1)

    def test_prompt_text_flattens(self):
        req = ChatRequest(model="m", messages=(("system", "a"), ("user", "b")))
        assert req.prompt_text() == "a\n\nb"


def _chat_body(text: str) -> dict:
    return {"choices": [{"message": {"content": text}}], "model": "stub", "usage": {"total_tokens": 3}}


def _provider(handler, **cfg_kwargs) -> HttpProvider:
    cfg = ProviderConfig(base_url="http://stub", api_key_env="STUB_KEY", **cfg_kwargs)
    return HttpProvider(cfg, transport=httpx.MockTransport(handler), sleep=lambda _s: None)


class TestHttpProvider:
    def test_missing_key_fails_before_network(self, monkeypatch):
        monkeypatch.delenv("STUB_KEY", raising=False)
        calls = []

        def handler(request):
            calls.append(request)
            return httpx.Response(200, json=_chat_body("hi"))

        provider = _provider(handler)
        with pytest.raises(AuthError):
            provider.chat(ChatRequest(model="m", messages=(("user", "x"),)))
        assert calls == []

    def test_retry_after_429(self, monkeypatch):
        monkeypatch.setenv("STUB_KEY", "k")
        statuses = [429, 200]

        def handler(request):
            status = statuses.pop(0)
            if status == 200:
                return httpx.Response(200, json=_chat_body("recovered"))
            return httpx.Response(status, text="slow down")

        provider = _provider(handler)
        resp = provider.chat(ChatRequest(model="m", messages=(("user", "x"),)))
        assert resp.text == "recovered"

    def test_4xx_not_retried(self, monkeypatch):
        monkeypatch.setenv("STUB_KEY", "k")
        calls = []

        def handler(request):
            calls.append(request)
            return httpx.Response(418, text="teapot")

        provider = _provider(handler)
        with pytest.raises(UpstreamError):
            provider.chat(ChatRequest(model="m", messages=(("user", "x"),)))
        assert len(calls) == 1

    def test_5xx_exhausts_attempts(self, monkeypatch):
        monkeypatch.setenv("STUB_KEY", "k")
        calls = []

        def handler(request):
            calls.append(request)
            return httpx.Response(503, text="down")

        provider = _provider(handler, max_attempts=3)
        with pytest.raises(UpstreamError):
            provider.chat(ChatRequest(model="m", messages=(("user", "x"),)))
        assert len(calls) == 3

    def test_embed_chunking_preserves_order(self, monkeypatch):
        monkeypatch.setenv("STUB_KEY", "k")
        seen_batches = []

        def handler(request):
            body = json.loads(request.content)
            batch = body["input"]
            seen_batches.append(len(batch))
            data = [
                {"index": i, "embedding": [float(len(t))]} for i, t in enumerate(batch)
            ]
            return httpx.Response(200, json={"data": data})

        provider = _provider(handler, embed_batch=2)
        out = provider.embed(["a", "bb", "ccc", "dddd", "eeeee"])
        assert out == [[1.0], [2.0], [3.0], [4.0], [5.0]]
        assert seen_batches == [2, 2, 1]

    def test_embed_empty_batch(self, monkeypatch):
        monkeypatch.setenv("STUB_KEY", "k")

        def handler(request):  # pragma: no cover - must not be called
            raise AssertionError("no request expected")

        provider = _provider(handler)
        assert provider.embed([]) == []


class TestTokenBucket:
    def test_throttles_after_capacity(self):
        times = iter([0.0, 0.0, 0.0, 0.0])
        slept = []
        bucket = TokenBucket(2, per_seconds=1.0, clock=lambda: next(times, 10.0), sleep=slept.append)
        bucket.acquire()
        bucket.acquire()
        bucket.acquire()  # third needs a refill
        assert slept  # waited at least once


class TestChatJson:
    def test_repair_retry_then_success(self):
        provider = MockProvider()
        # matchers run in insertion order: the repair prompt contains the
        # repair instruction, so it hits the valid fixture; the first call
        # falls through to the malformed one.
        provider.add_fixture_containing("corrected JSON object", '{"score": 0.5}')
        provider.add_fixture_containing("please-json", "not json at all")

        value = chat_json(
            provider,
            model="m",
            prompt="please-json",
            validate=lambda obj: obj["score"],
        )
        assert value == 0.5

    def test_twice_malformed_raises_parse_error(self):
        provider = MockProvider()
        provider.add_fixture_containing("please-json", "still { not json")
        with pytest.raises(ParseError):
            chat_json(provider, model="m", prompt="please-json", validate=lambda obj: obj)

    def test_validation_failure_raises_parse_error(self):
        provider = MockProvider()
        provider.add_fixture_containing("please-json", '{"score": 1.4}')

        def validate(obj):
            if not 0 <= obj["score"] <= 1:
                raise ValueError("range")
            return obj["score"]

        with pytest.raises(ParseError):
            chat_json(provider, model="m", prompt="please-json", validate=validate)

    def test_fenced_json_accepted(self):
        provider = MockProvider()
        provider.add_fixture_containing("please-json", '```json\n{"score": 0.25}\n```')
        value = chat_json(provider, model="m", prompt="please-json", validate=lambda o: o["score"])
        assert value == 0.25


class TestConfigFile:
    def test_load_bundle(self, tmp_path):
        cfg = {
            "providers": {
                "big": {"base_url": "http://one", "api_key_env": "K1"},
                "small": {"base_url": "http://two", "api_key_env": "K2", "rate_limit": [10, 60]},
            },
            "roles": {
                "generation": "big",
                "extraction": "small",
                "judge": "small",
                "embedding": "small",
            },
        }
        path = tmp_path / "providers.json"
        path.write_text(json.dumps(cfg))
        bundle = load_provider_config(str(path))
        assert bundle.generation.config.base_url == "http://one"
        assert bundle.judge.config.rate_limit == (10, 60)

    def test_unknown_role_reference(self, tmp_path):
        path = tmp_path / "providers.json"
        path.write_text(json.dumps({"providers": {}, "roles": {"generation": "nope"}}))
        with pytest.raises(SchemaError):
            load_provider_config(str(path))
