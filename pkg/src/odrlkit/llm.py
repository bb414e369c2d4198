"""Text-generation backends: live chat-completions HTTP, record and replay.

Replay fixtures are JSON files named by the SHA-256 of the canonical JSON of
``(system, user, model, temperature)``; everything else about a request is
ignored by the key.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

log = logging.getLogger(__name__)

API_KEY_ENV = "LLM_API_KEY"
FINISH_REASONS = ("complete", "truncated", "error")


class FixtureMissing(LookupError):
    def __init__(self, digest: str) -> None:
        super().__init__(digest)
        self.digest = digest

    def __str__(self) -> str:
        return f"no replay fixture for request {self.digest}"


class ProviderError(RuntimeError):
    def __init__(self, status: Optional[int], detail: str = "") -> None:
        super().__init__(status, detail)
        self.status = status
        self.detail = detail

    def __str__(self) -> str:
        return f"provider error (status {self.status}): {self.detail}" if self.detail else f"provider error (status {self.status})"


class NoCandidate(ValueError):
    """The response text is empty."""


@dataclass(frozen=True)
class GenerationRequest:
    system_text: str
    user_text: str
    model_id: str
    temperature: float = 0.0
    max_output: int = 4096

    def __post_init__(self) -> None:
        if not self.model_id:
            raise ValueError("model_id must be non-empty")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature must be within [0, 2], got {self.temperature}")
        if self.max_output <= 0:
            raise ValueError("max_output must be positive")

    def digest_fields(self) -> dict:
        return {
            "system": self.system_text,
            "user": self.user_text,
            "model": self.model_id,
            "temperature": float(self.temperature),
        }

    def digest(self) -> str:
        canonical = json.dumps(self.digest_fields(), sort_keys=True, ensure_ascii=False, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class GenerationResponse:
    text: str
    finish_reason: str = "complete"
    provider_metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.finish_reason not in FINISH_REASONS:
            raise ValueError(f"finish_reason must be one of {FINISH_REASONS}")
        if self.finish_reason == "complete" and not self.text:
            raise ValueError("a complete response must have text")


class Backend:
    def generate(self, request: GenerationRequest) -> GenerationResponse:
        raise NotImplementedError


def generate(request: GenerationRequest, backend: Backend) -> GenerationResponse:
    return backend.generate(request)


# Replay / record -----------------------------------------------------------


def fixture_path(directory, request: GenerationRequest) -> Path:
    return Path(directory) / f"{request.digest()}.json"


def _fixture_request(request: GenerationRequest) -> dict:
    # The system text (the guidance template) is tens of kilobytes and shared by
    # many fixtures, so only its hash is stored; the key covers the full text.
    system = request.system_text.encode("utf-8")
    return {
        "system_sha256": hashlib.sha256(system).hexdigest(),
        "system_chars": len(request.system_text),
        "user": request.user_text,
        "model": request.model_id,
        "temperature": float(request.temperature),
    }


def write_fixture(directory, request: GenerationRequest, response: GenerationResponse) -> Path:
    path = fixture_path(directory, request)
    path.parent.mkdir(parents=True, exist_ok=True)
    record = {
        "digest": request.digest(),
        "request": _fixture_request(request),
        "response": {
            "text": response.text,
            "finish_reason": response.finish_reason,
            "provider_metadata": response.provider_metadata,
        },
    }
    tmp = path.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(record, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
    os.replace(tmp, path)
    return path


class ReplayBackend(Backend):
    """Read-only lookup of recorded responses."""

    def __init__(self, directory) -> None:
        self.directory = Path(directory)

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        path = fixture_path(self.directory, request)
        if not path.is_file():
            raise FixtureMissing(request.digest())
        record = json.loads(path.read_text(encoding="utf-8"))
        resp = record["response"]
        return GenerationResponse(resp["text"], resp.get("finish_reason", "complete"), dict(resp.get("provider_metadata", {})))


class RecordingBackend(Backend):
    """Forwards to ``inner`` and stores every response as a replay fixture."""

    def __init__(self, inner: Backend, directory) -> None:
        self.inner = inner
        self.directory = Path(directory)
        self._lock = threading.Lock()

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        response = self.inner.generate(request)
        with self._lock:
            write_fixture(self.directory, request, response)
        return response


class CallableBackend(Backend):
    """Responses computed by a plain function; for scripted runs and tests."""

    def __init__(self, fn: Callable[[GenerationRequest], object]) -> None:
        self.fn = fn

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        out = self.fn(request)
        if isinstance(out, GenerationResponse):
            return out
        return GenerationResponse(str(out), "complete" if out else "error")


# Live HTTP ---------------------------------------------------------------------


class TokenBucket:
    """Allows ``rate`` acquisitions per second with bursts up to ``capacity``."""

    def __init__(self, rate: float, capacity: float, clock=time.monotonic, sleep=time.sleep) -> None:
        if rate <= 0 or capacity <= 0:
            raise ValueError("rate and capacity must be positive")
        self.rate = rate
        self.capacity = capacity
        self.tokens = capacity
        self.clock = clock
        self.sleep = sleep
        self.updated = clock()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self.clock()
                self.tokens = min(self.capacity, self.tokens + (now - self.updated) * self.rate)
                self.updated = now
                if self.tokens >= 1:
                    self.tokens -= 1
                    return
                wait = (1 - self.tokens) / self.rate
            self.sleep(wait)


_FINISH_MAP = {"stop": "complete", "length": "truncated", "max_tokens": "truncated", "end_turn": "complete"}
_RETRY_STATUS = {429}


class LiveBackend(Backend):
    """OpenAI-style chat completions over HTTP.

    The credential is read from the ``LLM_API_KEY`` environment variable only.
    Transport failures and HTTP 429 are retried with exponential backoff.
    """

    def __init__(
        self,
        endpoint: str,
        *,
        max_attempts: int = 3,
        backoff: float = 1.0,
        max_in_flight: int = 4,
        rate_per_second: float = 2.0,
        burst: float = 4.0,
        timeout: float = 120.0,
        client=None,
        sleep=time.sleep,
    ) -> None:
        import httpx

        if not endpoint:
            raise ValueError("live backend needs an endpoint URL")
        self.endpoint = endpoint
        self.max_attempts = max_attempts
        self.backoff = backoff
        self.sleep = sleep
        self._slots = threading.BoundedSemaphore(max_in_flight)
        self._bucket = TokenBucket(rate_per_second, burst, sleep=sleep)
        self._client = client or httpx.Client(timeout=timeout)
        self._httpx = httpx

    def _headers(self) -> dict:
        key = os.environ.get(API_KEY_ENV)
        if not key:
            raise ProviderError(None, f"environment variable {API_KEY_ENV} is not set")
        return {"Authorization": f"Bearer {key}", "Content-Type": "application/json"}

    def body(self, request: GenerationRequest) -> dict:
        return {
            "model": request.model_id,
            "temperature": request.temperature,
            "max_tokens": request.max_output,
            "messages": [
                {"role": "system", "content": request.system_text},
                {"role": "user", "content": request.user_text},
            ],
        }

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        headers = self._headers()
        body = self.body(request)
        status: Optional[int] = None
        detail = ""
        for attempt in range(1, self.max_attempts + 1):
            self._bucket.acquire()
            with self._slots:
                try:
                    reply = self._client.post(self.endpoint, json=body, headers=headers)
                except self._httpx.TransportError as exc:
                    status, detail = None, f"{type(exc).__name__}: {exc}"
                    reply = None
            if reply is not None:
                status = reply.status_code
                if status < 400:
                    return self._parse(reply)
                detail = reply.text[:200]
                if status not in _RETRY_STATUS:
                    break
            if attempt < self.max_attempts:
                delay = self.backoff * 2 ** (attempt - 1)
                log.warning("request failed (status %s), retrying in %.1fs", status, delay)
                self.sleep(delay)
        raise ProviderError(status, detail)

    @staticmethod
    def _parse(reply) -> GenerationResponse:
        try:
            payload = reply.json()
            choice = payload["choices"][0]
            text = choice["message"]["content"] or ""
            raw_reason = choice.get("finish_reason")
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ProviderError(reply.status_code, f"malformed response body: {exc}") from exc
        reason = _FINISH_MAP.get(raw_reason, "complete" if text else "error")
        if reason == "complete" and not text:
            reason = "error"
        meta = {"finish_reason": raw_reason}
        for key in ("id", "model", "usage"):
            if key in payload:
                meta[key] = payload[key]
        return GenerationResponse(text, reason, meta)


@dataclass(frozen=True)
class BackendConfig:
    mode: str  # "replay" | "live" | "record"
    fixtures: Optional[str] = None
    endpoint: Optional[str] = None
    max_in_flight: int = 4
    rate_per_second: float = 2.0

    def build(self) -> Backend:
        if self.mode == "replay":
            if not self.fixtures:
                raise ValueError("replay mode needs a fixture directory")
            return ReplayBackend(self.fixtures)
        if self.mode in ("live", "record"):
            live = LiveBackend(self.endpoint or "", max_in_flight=self.max_in_flight, rate_per_second=self.rate_per_second)
            if self.mode == "record":
                if not self.fixtures:
                    raise ValueError("record mode needs a fixture directory")
                return RecordingBackend(live, self.fixtures)
            return live
        raise ValueError(f"unknown backend mode {self.mode!r}")


# Post-processing -------------------------------------------------------------

_FENCE = re.compile(r"```[ \t]*([\w+-]*)[^\n]*\n(.*?)(?:```|\Z)", re.S)
_START = re.compile(r"@prefix\b|@base\b|\bPREFIX\b|\bBASE\b")


def _parses(text: str) -> bool:
    from .rdf import TurtleSyntaxError, parse_turtle

    try:
        parse_turtle(text)
    except (TurtleSyntaxError, ValueError):
        return False
    return True


def extract_turtle(response_text: str) -> str:
    """Best Turtle candidate inside an LLM answer.

    Order: the first fenced block that parses; else the text from the first
    ``@prefix``/``PREFIX`` onward, cut back to the longest prefix ending at a
    statement boundary that parses; else the whole text.
    """
    if not response_text or not response_text.strip():
        raise NoCandidate("empty response")
    blocks = [m.group(2) for m in _FENCE.finditer(response_text)]
    for block in blocks:
        if block.strip() and _parses(block):
            return block
    m = _START.search(response_text)
    if m:
        tail = response_text[m.start():]
        if _parses(tail):
            return tail
        for cut in sorted((i + 1 for i, ch in enumerate(tail) if ch == "."), reverse=True):
            candidate = tail[:cut]
            if _is_statement_end(tail, cut) and _parses(candidate):
                return candidate
        return tail
    return response_text


def _is_statement_end(text: str, cut: int) -> bool:
    return cut >= len(text) or text[cut] in " \t\r\n"
