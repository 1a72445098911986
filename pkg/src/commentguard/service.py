"""HTTP classification service.

Endpoints: POST /scam (one verdict), POST /scam/batch (up to 200, order
preserving, per-item errors), POST /report (misclassification intake,
durable before acknowledgment), GET /health.  The loaded model is
immutable shared state; requests never mutate it.

By design there is no authentication, and classified comments are never
stored or logged — only explicitly reported ones are written, to the
report store the user configured.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Union

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from starlette.concurrency import run_in_threadpool

from .classifiers import ClassifierModel, Prediction
from .classifiers.model import predict
from .errors import CommentGuardError, RemoteUnavailableError

MAX_COMMENT_CHARS = 10_000
MAX_BATCH_SIZE = 200

ENV_PREFIX = "COMMENTGUARD_"


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    model_path: str | None = None
    report_store_path: str = "reports.jsonl"
    rate_limit_enabled: bool = True
    rate_limit_per_second: float = 10.0
    rate_limit_burst: int = 10
    cors_origins: tuple[str, ...] = ("*",)


_CONFIG_PARSERS: dict[str, Callable[[str], object]] = {
    "host": str,
    "port": int,
    "model_path": str,
    "report_store_path": str,
    "rate_limit_enabled": lambda s: s.lower() in ("1", "true", "yes", "on"),
    "rate_limit_per_second": float,
    "rate_limit_burst": int,
    "cors_origins": lambda s: tuple(part.strip() for part in s.split(",") if part.strip()),
}


def load_service_config(
    path: Union[str, Path, None] = None, env: Mapping[str, str] = os.environ
) -> ServiceConfig:
    """Config file values first, then COMMENTGUARD_* environment overrides."""
    values: dict[str, object] = {}
    if path is not None:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise ValueError("service config file must hold a JSON object")
        for key, value in data.items():
            if key not in _CONFIG_PARSERS:
                raise ValueError(f"unknown service config key: {key!r}")
            values[key] = tuple(value) if key == "cors_origins" else value
    for key, parser in _CONFIG_PARSERS.items():
        raw = env.get(ENV_PREFIX + key.upper())
        if raw is not None:
            values[key] = parser(raw)
    return ServiceConfig(**values)


@dataclass
class ModelHandle:
    """What the service needs from a model: a name, a kind, a classify fn."""

    name: str
    kind: str
    classify: Callable[[str], Prediction]

    @classmethod
    def from_model(cls, model: ClassifierModel) -> "ModelHandle":
        return cls(
            name=model.name,
            kind=model.kind,
            classify=lambda text: predict(model, text),
        )


class ReportStore:
    """Append-only JSONL sink; every append is fsynced before returning."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, record: dict) -> None:
        line = json.dumps(record, ensure_ascii=False)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as handle:
                handle.write(line + "\n")
                handle.flush()
                os.fsync(handle.fileno())

    def count(self) -> int:
        if not self.path.exists():
            return 0
        with open(self.path, "r", encoding="utf-8") as handle:
            return sum(1 for line in handle if line.strip())

    def records(self) -> list[dict]:
        if not self.path.exists():
            return []
        with open(self.path, "r", encoding="utf-8") as handle:
            return [json.loads(line) for line in handle if line.strip()]


class TokenBucketLimiter:
    """Per-client token bucket; refills continuously at rate/second."""

    def __init__(
        self,
        rate_per_second: float,
        burst: int,
        clock: Callable[[], float] = time.monotonic,
    ):
        self._rate = rate_per_second
        self._burst = float(burst)
        self._clock = clock
        self._buckets: dict[str, tuple[float, float]] = {}
        self._lock = threading.Lock()

    def allow(self, key: str) -> bool:
        now = self._clock()
        with self._lock:
            tokens, last = self._buckets.get(key, (self._burst, now))
            tokens = min(self._burst, tokens + (now - last) * self._rate)
            if tokens >= 1.0:
                self._buckets[key] = (tokens - 1.0, now)
                return True
            self._buckets[key] = (tokens, now)
            return False


_MALFORMED = object()


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def _validate_comment(value: object) -> tuple[str | None, str | None]:
    """Returns (comment, None) when usable, else (None, reason)."""
    if not isinstance(value, str):
        return None, "comment must be a string"
    trimmed = value.strip()
    if not trimmed:
        return None, "comment is empty"
    if len(trimmed) > MAX_COMMENT_CHARS:
        return None, f"comment exceeds {MAX_COMMENT_CHARS} characters"
    return value, None


def create_app(
    handle: ModelHandle | None,
    config: ServiceConfig | None = None,
    clock: Callable[[], float] = time.monotonic,
) -> FastAPI:
    """Build the service app around one loaded model handle.

    handle may be None to model the not-yet-loaded startup window: health
    and classification then answer 503.
    """
    config = config or ServiceConfig()
    app = FastAPI(title="commentguard", docs_url=None, redoc_url=None)
    app.state.handle = handle
    app.state.config = config
    app.state.started = clock()
    app.state.clock = clock
    app.state.report_store = ReportStore(config.report_store_path)
    app.state.limiter = (
        TokenBucketLimiter(config.rate_limit_per_second, config.rate_limit_burst, clock)
        if config.rate_limit_enabled
        else None
    )

    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(config.cors_origins),
        allow_methods=["GET", "POST"],
        allow_headers=["*"],
    )

    @app.middleware("http")
    async def rate_limit(request: Request, call_next):
        limiter: TokenBucketLimiter | None = app.state.limiter
        if limiter is not None and request.url.path != "/health":
            client = request.client.host if request.client else "unknown"
            if not limiter.allow(client):
                return _error(429, "rate limit exceeded")
        return await call_next(request)

    async def read_body(request: Request) -> object:
        try:
            raw = await request.body()
            return json.loads(raw)
        except (json.JSONDecodeError, UnicodeDecodeError):
            return _MALFORMED

    def classify_one(text: str) -> dict:
        handle_now: ModelHandle = app.state.handle
        prediction = handle_now.classify(text)
        return {
            "label": prediction.label.wire,
            "score": prediction.score,
            "model": handle_now.name,
        }

    @app.post("/scam")
    async def scam(request: Request):
        if app.state.handle is None:
            return _error(503, "model not loaded")
        body = await read_body(request)
        if body is _MALFORMED or not isinstance(body, dict) or "comment" not in body:
            return _error(400, "body must be a JSON object with a comment field")
        comment = body["comment"]
        if not isinstance(comment, str):
            return _error(400, "comment must be a string")
        usable, reason = _validate_comment(comment)
        if usable is None:
            return _error(422, reason)
        try:
            result = await run_in_threadpool(classify_one, usable)
        except RemoteUnavailableError:
            return _error(503, "model backend unavailable")
        return JSONResponse(status_code=200, content=result)

    @app.post("/scam/batch")
    async def scam_batch(request: Request):
        if app.state.handle is None:
            return _error(503, "model not loaded")
        body = await read_body(request)
        if body is _MALFORMED or not isinstance(body, dict) or "comments" not in body:
            return _error(400, "body must be a JSON object with a comments list")
        comments = body["comments"]
        if not isinstance(comments, list):
            return _error(400, "comments must be a list")
        if not 1 <= len(comments) <= MAX_BATCH_SIZE:
            return _error(422, f"batch size must be 1..{MAX_BATCH_SIZE}")

        def classify_all() -> list[dict]:
            results = []
            for value in comments:
                usable, reason = _validate_comment(value)
                if usable is None:
                    results.append({"error": reason})
                    continue
                try:
                    results.append(classify_one(usable))
                except CommentGuardError as exc:
                    results.append({"error": f"classification failed: {exc}"})
            return results

        results = await run_in_threadpool(classify_all)
        return JSONResponse(status_code=200, content={"results": results})

    @app.post("/report")
    async def report(request: Request):
        if app.state.handle is None:
            return _error(503, "model not loaded")
        body = await read_body(request)
        if body is _MALFORMED or not isinstance(body, dict):
            return _error(400, "body must be a JSON object")
        comment = body.get("comment")
        predicted = body.get("predicted")
        reported = body.get("reported")
        client_ts = body.get("client_ts")
        if not isinstance(comment, str) or not comment.strip():
            return _error(400, "comment must be a non-empty string")
        if predicted not in ("genuine", "fraud") or reported not in ("genuine", "fraud"):
            return _error(400, "predicted and reported must be genuine or fraud")
        if client_ts is not None and not isinstance(client_ts, str):
            return _error(400, "client_ts must be a string timestamp")
        if predicted == reported:
            return _error(422, "a report must assert a disagreement")
        record = {
            "comment": comment,
            "predicted": predicted,
            "reported": reported,
            "client_ts": client_ts,
            "server_ts": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
            "model": app.state.handle.name,
        }
        store: ReportStore = app.state.report_store
        await run_in_threadpool(store.append, record)
        return JSONResponse(status_code=202, content={"accepted": True})

    @app.get("/health")
    async def health():
        handle_now: ModelHandle | None = app.state.handle
        if handle_now is None:
            return JSONResponse(status_code=503, content={"status": "loading"})
        uptime = app.state.clock() - app.state.started
        return JSONResponse(
            status_code=200,
            content={
                "status": "ok",
                "model": handle_now.name,
                "kind": handle_now.kind,
                "uptime_s": round(uptime, 3),
            },
        )

    return app
