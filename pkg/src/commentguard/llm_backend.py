"""Remote classification backends.

Two adapters live here: the zero-shot chat-completion protocol (system and
user prompt, label-word reply) and a generic inference-endpoint client that
speaks this suite's own /scam wire format.  Both are driven through a small
transport seam so tests can replay recorded replies or script failures
without any network.

Privacy rule: comment text is never written to logs by this module; only
attempt counts and error categories are logged.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import string
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol, Sequence, Union

import httpx

from .corpus import BinaryLabel, LabeledComment, RawLabel, collapse_label
from .errors import (
    EmptyCommentError,
    EmptyInputError,
    MalformedResponseError,
    RateLimitedError,
    RemoteUnavailableError,
    UnmappableReplyError,
)
from .classifiers.model import Prediction
from .metrics import ConfusionMatrix, MetricSet, confusion, derive_metrics, roc_auc

logger = logging.getLogger(__name__)

DEFAULT_SYSTEM_PROMPT = "You are a comment moderator at Instagram classifying comments."
DEFAULT_USER_TEMPLATE = (
    "Classify the following Instagram comment as 'spam', 'scam', or 'genuine'. "
    "Reply only with the label for this comment: '{comment}'"
)


@dataclass(frozen=True)
class LlmConfig:
    """Zero-shot chat protocol settings; defaults mirror the studied setup."""

    model_name: str = "gpt-4-1106-preview"
    max_tokens: int = 10
    temperature: float = 0.0
    seed: int = 42
    system_prompt: str = DEFAULT_SYSTEM_PROMPT
    user_template: str = DEFAULT_USER_TEMPLATE
    timeout: float = 30.0
    retries: int = 2
    backoff_seconds: float = 0.5
    api_key_env: str = "OPENAI_API_KEY"
    api_base_url: str = "https://api.openai.com/v1"

    def __post_init__(self) -> None:
        if self.user_template.count("{comment}") != 1:
            raise ValueError("user_template must contain {comment} exactly once")
        if self.retries < 0:
            raise ValueError("retries must be non-negative")


@dataclass(frozen=True)
class ChatRequest:
    """One chat-completion call; hashable so replies can be replayed."""

    model: str
    system: str
    user: str
    max_tokens: int
    temperature: float
    seed: int

    def canonical_json(self) -> str:
        payload = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": self.system},
                {"role": "user", "content": self.user},
            ],
            "max_tokens": self.max_tokens,
            "temperature": self.temperature,
            "seed": self.seed,
        }
        return json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()


class ChatTransport(Protocol):
    def send(self, request: ChatRequest) -> str:
        """Return the assistant reply text; raise on transport problems."""


class HttpChatTransport:
    """Live chat-completions client; API key comes from the environment."""

    def __init__(self, cfg: LlmConfig):
        self._cfg = cfg
        key = os.environ.get(cfg.api_key_env)
        if not key:
            raise RemoteUnavailableError(
                f"environment variable {cfg.api_key_env} is not set"
            )
        self._headers = {"Authorization": f"Bearer {key}"}

    def send(self, request: ChatRequest) -> str:
        url = self._cfg.api_base_url.rstrip("/") + "/chat/completions"
        try:
            response = httpx.post(
                url,
                headers=self._headers,
                content=request.canonical_json().encode("utf-8"),
                timeout=self._cfg.timeout,
            )
        except httpx.TimeoutException as exc:
            raise RemoteUnavailableError(f"chat endpoint timed out: {exc}") from exc
        except httpx.HTTPError as exc:
            raise RemoteUnavailableError(f"chat endpoint unreachable: {exc}") from exc
        if response.status_code == 429:
            raise RateLimitedError("chat endpoint returned 429")
        if response.status_code >= 500:
            raise RemoteUnavailableError(f"chat endpoint returned {response.status_code}")
        if response.status_code != 200:
            raise MalformedResponseError(
                f"chat endpoint returned {response.status_code}"
            )
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise MalformedResponseError(f"unexpected chat response shape: {exc}") from exc


class ReplayTransport:
    """Replays recorded replies keyed by request digest; fully offline."""

    def __init__(self, path: Union[str, Path]):
        self._replies: dict[str, str] = {}
        with open(path, "r", encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                self._replies[record["digest"]] = record["reply"]

    def send(self, request: ChatRequest) -> str:
        digest = request.digest()
        if digest not in self._replies:
            raise RemoteUnavailableError(f"no recorded reply for digest {digest[:12]}")
        return self._replies[digest]


def record_reply(path: Union[str, Path], request: ChatRequest, reply: str) -> None:
    """Append one (digest, reply) fixture line for later replay."""
    line = json.dumps({"digest": request.digest(), "reply": reply}, ensure_ascii=False)
    with open(path, "a", encoding="utf-8") as handle:
        handle.write(line + "\n")


class ScriptedTransport:
    """Yields scripted replies (or raises scripted exceptions) in order.

    The last entry repeats once the script is exhausted; ``attempts`` counts
    every send for retry assertions.
    """

    def __init__(self, script: Sequence[Union[str, Exception]]):
        if not script:
            raise ValueError("script must not be empty")
        self._script = list(script)
        self.attempts = 0

    def send(self, request: ChatRequest) -> str:
        entry = self._script[min(self.attempts, len(self._script) - 1)]
        self.attempts += 1
        if isinstance(entry, Exception):
            raise entry
        return entry


def build_prompt(comment: str, cfg: LlmConfig) -> tuple[str, str]:
    """System and user message for one comment, substituted verbatim."""
    if not comment.strip():
        raise EmptyCommentError("cannot classify an empty comment")
    return cfg.system_prompt, cfg.user_template.replace("{comment}", comment)


_LABEL_WORDS = {label.value: label for label in RawLabel}
# Terminal punctuation stripped during reply normalization; covers ASCII
# punctuation plus the quote/ellipsis characters chat models emit.
_TERMINAL_PUNCT = string.punctuation + "‘’“”…"


def parse_reply(reply: str) -> RawLabel:
    """Normalize a model reply and map it onto the three-way label set.

    Normalization: trim, lowercase, strip terminal punctuation, take the
    first whitespace-delimited word.  Anything else is UnmappableReply; the
    caller decides how to score it, never this function.
    """
    normalized = reply.strip().lower().rstrip(_TERMINAL_PUNCT)
    words = normalized.split()
    word = words[0] if words else ""
    if word in _LABEL_WORDS:
        return _LABEL_WORDS[word]
    raise UnmappableReplyError(f"reply does not normalize to a label: {reply!r}")


def chat_request(comment: str, cfg: LlmConfig) -> ChatRequest:
    system, user = build_prompt(comment, cfg)
    return ChatRequest(
        model=cfg.model_name,
        system=system,
        user=user,
        max_tokens=cfg.max_tokens,
        temperature=cfg.temperature,
        seed=cfg.seed,
    )


def classify_remote(
    comment: str,
    cfg: LlmConfig,
    transport: ChatTransport,
    sleep: Callable[[float], None] = time.sleep,
) -> Prediction:
    """Zero-shot classification of one comment through a chat transport.

    Transport failures retry up to cfg.retries times (rate limits with
    exponential backoff); an unmappable reply is a real answer and is
    raised immediately without retrying.
    """
    request = chat_request(comment, cfg)
    attempts = cfg.retries + 1
    for attempt in range(attempts):
        try:
            reply = transport.send(request)
        except RateLimitedError:
            if attempt + 1 == attempts:
                logger.debug("rate limited on final attempt %d", attempt + 1)
                raise
            sleep(cfg.backoff_seconds * (2**attempt))
            continue
        except RemoteUnavailableError:
            if attempt + 1 == attempts:
                logger.debug("transport failed on final attempt %d", attempt + 1)
                raise
            continue
        raw = parse_reply(reply)
        label = collapse_label(raw)
        score = 1.0 if label is BinaryLabel.FRAUD else 0.0
        return Prediction(label=label, score=score)
    raise AssertionError("unreachable: retry loop always returns or raises")


@dataclass(frozen=True)
class EndpointConfig:
    """Where an externally served classifier (e.g. a fine-tuned
    transformer) answers /scam-format requests."""

    url: str
    timeout: float = 10.0


class InferenceTransport(Protocol):
    def classify(self, endpoint: EndpointConfig, comment: str) -> object:
        """Return the decoded JSON response body."""


class HttpInferenceTransport:
    def classify(self, endpoint: EndpointConfig, comment: str) -> object:
        try:
            response = httpx.post(
                endpoint.url, json={"comment": comment}, timeout=endpoint.timeout
            )
        except httpx.HTTPError as exc:
            raise RemoteUnavailableError(f"inference endpoint unreachable: {exc}") from exc
        if response.status_code >= 500:
            raise RemoteUnavailableError(
                f"inference endpoint returned {response.status_code}"
            )
        try:
            return response.json()
        except ValueError as exc:
            raise MalformedResponseError("inference endpoint sent non-JSON") from exc


class StubInferenceTransport:
    """Returns a fixed body (or raises a fixed exception); test double."""

    def __init__(self, body: object = None, error: Exception | None = None):
        self._body = body
        self._error = error
        self.calls = 0

    def classify(self, endpoint: EndpointConfig, comment: str) -> object:
        self.calls += 1
        if self._error is not None:
            raise self._error
        return self._body


def classify_inference_endpoint(
    comment: str,
    endpoint: Union[EndpointConfig, "object"],
    transport: InferenceTransport | None = None,
) -> Prediction:
    """Forward a comment to a /scam-format endpoint and map the response.

    Accepts either an EndpointConfig or a remote-model parameter object
    exposing endpoint_url/timeout fields.
    """
    if not isinstance(endpoint, EndpointConfig):
        endpoint = EndpointConfig(
            url=endpoint.endpoint_url, timeout=getattr(endpoint, "timeout", 10.0)
        )
    transport = transport or HttpInferenceTransport()
    body = transport.classify(endpoint, comment)
    if not isinstance(body, dict):
        raise MalformedResponseError("inference response must be a JSON object")
    label_value = body.get("label")
    if label_value not in ("genuine", "fraud"):
        raise MalformedResponseError(f"inference label out of range: {label_value!r}")
    score = body.get("score")
    if not isinstance(score, (int, float)) or not 0.0 <= float(score) <= 1.0:
        raise MalformedResponseError(f"inference score out of range: {score!r}")
    return Prediction(label=BinaryLabel.from_wire(label_value), score=float(score))


@dataclass(frozen=True)
class RemoteEvaluation:
    """Outcome of evaluating a remote backend over labeled comments."""

    matrix: ConfusionMatrix
    metrics: MetricSet
    unmappable: int


def evaluate_remote(
    items: Sequence[LabeledComment],
    cfg: LlmConfig,
    transport: ChatTransport,
    sleep: Callable[[float], None] = time.sleep,
) -> RemoteEvaluation:
    """Classify every item and score the run.

    Unmappable replies are tallied separately and scored as genuine in the
    confusion matrix (garbage never flags a user), exactly as reported.
    ROC AUC comes from the hard 0/1 scores, so it equals (TPR + TNR) / 2.
    """
    if not items:
        raise EmptyInputError("nothing to evaluate")
    predicted: list[BinaryLabel] = []
    scores: list[float] = []
    unmappable = 0
    for item in items:
        try:
            prediction = classify_remote(item.comment.text, cfg, transport, sleep=sleep)
            predicted.append(prediction.label)
            scores.append(prediction.score)
        except UnmappableReplyError:
            unmappable += 1
            predicted.append(BinaryLabel.GENUINE)
            scores.append(0.0)
    gold = [item.binary for item in items]
    matrix = confusion(predicted, gold)
    auc = None
    if len(set(gold)) == 2:
        auc = roc_auc(scores, gold)
    metrics = derive_metrics(matrix, roc_auc=auc)
    return RemoteEvaluation(matrix=matrix, metrics=metrics, unmappable=unmappable)
