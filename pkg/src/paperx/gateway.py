"""Provider-agnostic chat client with record/replay and cost accounting.

Every model call in the pipeline funnels through :meth:`Gateway.complete`.
Requests are keyed by a content digest so a recorded transcript replays the
whole pipeline offline and deterministically. The ledger accumulates token
usage per stage for the cost report.
"""

from __future__ import annotations

import base64
import csv
import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Callable, Iterable

from .errors import (
    AuthError,
    ConfigError,
    NoJsonFound,
    NoLedger,
    ReplayMiss,
    TransportError,
    ValidationExhausted,
)

log = logging.getLogger(__name__)

STAGE_TAGS = (
    "dag_decompose",
    "dag_visual",
    "ppt_outline",
    "ppt_slide",
    "ppt_audit",
    "ppt_revise",
    "poster_outline",
    "pr_outline",
    "pr_final",
)

# Sampling temperature per stage; callers may override through RunConfig.
DEFAULT_TEMPERATURES: dict[str, float] = {
    "dag_decompose": 0.2,
    "dag_visual": 1.0,
    "ppt_outline": 0.0,
    "ppt_slide": 1.0,
    "ppt_audit": 1.0,
    "ppt_revise": 1.0,
    "poster_outline": 1.0,
    "pr_outline": 0.0,
    "pr_final": 0.4,
}

ENV_API_KEY = "PAPERX_API_KEY"
ENV_BASE_URL = "PAPERX_BASE_URL"
ENV_MODEL = "PAPERX_MODEL"
DEFAULT_BASE_URL = "https://api.openai.com/v1/chat/completions"


@dataclass(frozen=True)
class TextPart:
    text: str


@dataclass(frozen=True)
class ImagePart:
    path: str
    media_type: str = "image/png"


@dataclass
class ChatRequest:
    model: str
    system: str
    user_parts: list
    stage_tag: str
    temperature: float = 0.0
    max_output_tokens: int = 4096

    def __post_init__(self) -> None:
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature {self.temperature} outside [0, 2]")
        if not self.user_parts:
            raise ValueError("request needs at least one user part")
        if self.stage_tag not in STAGE_TAGS:
            raise ValueError(f"unknown stage tag '{self.stage_tag}'")

    def user_text(self) -> str:
        return "\n".join(p.text for p in self.user_parts if isinstance(p, TextPart))


@dataclass
class ChatResponse:
    text: str
    input_tokens: int = 0
    output_tokens: int = 0


def request_digest(request: ChatRequest) -> str:
    """Stable content hash: model, system, user text, image bytes, temperature.

    Images are hashed by content so replay keys survive file moves.
    """
    parts = []
    for p in request.user_parts:
        if isinstance(p, TextPart):
            parts.append({"text": p.text})
        else:
            digest = hashlib.sha256(Path(p.path).read_bytes()).hexdigest()
            parts.append({"image_sha256": digest, "media_type": p.media_type})
    canon = json.dumps(
        {
            "model": request.model,
            "system": request.system,
            "parts": parts,
            "temperature": request.temperature,
        },
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


class Transcript:
    """Digest-keyed store of responses; modes: live, record, replay."""

    def __init__(self, mode: str = "live", path: str | Path | None = None):
        if mode not in ("live", "record", "replay"):
            raise ValueError(f"unknown transcript mode '{mode}'")
        self.mode = mode
        self.path = Path(path) if path else None
        self.entries: dict[str, ChatResponse] = {}
        self._stages: dict[str, str] = {}
        if mode == "replay":
            if self.path is None or not self.path.exists():
                raise ConfigError(f"replay transcript not found: {self.path}")
            self._load()

    def _load(self) -> None:
        assert self.path is not None
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                obj = json.loads(line)
                self.entries[obj["digest"]] = ChatResponse(
                    text=obj["response_text"],
                    input_tokens=obj["input_tokens"],
                    output_tokens=obj["output_tokens"],
                )
                self._stages[obj["digest"]] = obj.get("stage", "")

    def get(self, digest: str) -> ChatResponse | None:
        return self.entries.get(digest)

    def put(self, digest: str, stage: str, response: ChatResponse) -> None:
        self.entries[digest] = response
        self._stages[digest] = stage
        if self.mode == "record" and self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(
                    json.dumps(
                        {
                            "digest": digest,
                            "stage": stage,
                            "response_text": response.text,
                            "input_tokens": response.input_tokens,
                            "output_tokens": response.output_tokens,
                        },
                        ensure_ascii=False,
                    )
                    + "\n"
                )


@dataclass
class LedgerEntry:
    stage: str
    model: str
    input_tokens: int
    output_tokens: int
    cost_usd: float


def _round_half_up(value: Decimal, places: str) -> float:
    return float(value.quantize(Decimal(places), rounding=ROUND_HALF_UP))


class CostLedger:
    """Token/cost accumulator. Prices come from config, never from code."""

    def __init__(self, prices: dict[str, tuple[float, float]] | None = None):
        self.prices = dict(prices or {})
        self.entries: list[LedgerEntry] = []
        self._warned_models: set[str] = set()
        self._lock = threading.Lock()

    def unit_cost(self, model: str, input_tokens: int, output_tokens: int) -> float:
        pair = self.prices.get(model)
        if pair is None:
            if model not in self._warned_models:
                self._warned_models.add(model)
                log.warning("no price configured for model '%s'; cost recorded as 0", model)
            return 0.0
        p_in, p_out = (Decimal(str(p)) for p in pair)
        cost = Decimal(input_tokens) / 1000 * p_in + Decimal(output_tokens) / 1000 * p_out
        return _round_half_up(cost, "0.0001")

    def record(self, stage: str, model: str, input_tokens: int, output_tokens: int) -> LedgerEntry:
        entry = LedgerEntry(
            stage=stage,
            model=model,
            input_tokens=input_tokens,
            output_tokens=output_tokens,
            cost_usd=self.unit_cost(model, input_tokens, output_tokens),
        )
        with self._lock:
            self.entries.append(entry)
        return entry

    def add(self, entry: LedgerEntry) -> None:
        """Append a pre-costed entry (e.g. loaded from a CSV export)."""
        with self._lock:
            self.entries.append(entry)

    def export_csv(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["stage", "model", "input_tokens", "output_tokens", "cost_usd"])
            for e in self.entries:
                writer.writerow([e.stage, e.model, e.input_tokens, e.output_tokens, f"{e.cost_usd:.4f}"])

    @classmethod
    def load_csv(cls, path: str | Path) -> "CostLedger":
        path = Path(path)
        if not path.exists():
            raise NoLedger(f"ledger file not found: {path}")
        ledger = cls()
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                ledger.entries.append(
                    LedgerEntry(
                        stage=row["stage"],
                        model=row["model"],
                        input_tokens=int(row["input_tokens"]),
                        output_tokens=int(row["output_tokens"]),
                        cost_usd=float(row["cost_usd"]),
                    )
                )
        return ledger


def ledger_total(
    ledger: CostLedger, group_by: str = "all"
) -> dict[str, tuple[int, int, float]]:
    """Exact token sums and 2-decimal cost totals, keyed by the chosen group.

    The grand total is defined as the component-wise sum over the stage
    groups, so conservation (total == sum of stage rows) holds exactly.
    """
    if group_by not in ("stage", "model", "all"):
        raise ValueError(f"unknown grouping '{group_by}'")
    if group_by == "all":
        by_stage = ledger_total(ledger, "stage")
        tin = sum(v[0] for v in by_stage.values())
        tout = sum(v[1] for v in by_stage.values())
        cost = sum((Decimal(str(v[2])) for v in by_stage.values()), Decimal("0"))
        return {"all": (tin, tout, _round_half_up(cost, "0.01"))}
    groups: dict[str, tuple[int, int, Decimal]] = {}
    for e in ledger.entries:
        key = getattr(e, group_by)
        tin, tout, cost = groups.get(key, (0, 0, Decimal("0")))
        groups[key] = (
            tin + e.input_tokens,
            tout + e.output_tokens,
            cost + Decimal(str(e.cost_usd)),
        )
    return {
        key: (tin, tout, _round_half_up(cost, "0.01")) for key, (tin, tout, cost) in groups.items()
    }


def extract_json(text: str):
    """First balanced top-level JSON object or array in ``text``.

    Code-fence markers are stripped first; prompts forbid fences but the
    parser must survive violations.
    """
    stripped = text.strip()
    if stripped.startswith("```"):
        first_nl = stripped.find("\n")
        stripped = stripped[first_nl + 1 :] if first_nl != -1 else ""
        if stripped.rstrip().endswith("```"):
            stripped = stripped.rstrip()[:-3]
    start = None
    for i, ch in enumerate(stripped):
        if ch in "{[":
            start = i
            break
    if start is None:
        raise NoJsonFound("no JSON object or array found in model output")
    opener = stripped[start]
    closer = "}" if opener == "{" else "]"
    depth = 0
    in_string = False
    escape = False
    for i in range(start, len(stripped)):
        ch = stripped[i]
        if in_string:
            if escape:
                escape = False
            elif ch == "\\":
                escape = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch in "{[":
            depth += 1
        elif ch in "}]":
            depth -= 1
            if depth == 0:
                if ch != closer and stripped[start] != ch:
                    break
                candidate = stripped[start : i + 1]
                try:
                    return json.loads(candidate)
                except json.JSONDecodeError as exc:
                    raise NoJsonFound(f"unparsable JSON candidate: {exc.msg}") from None
    raise NoJsonFound("unbalanced JSON in model output")


def http_transport(request: ChatRequest) -> ChatResponse:
    """POST the request to an OpenAI-compatible chat endpoint."""
    import requests

    api_key = os.environ.get(ENV_API_KEY, "")
    if not api_key:
        raise AuthError(f"{ENV_API_KEY} is not set; required outside replay mode")
    url = os.environ.get(ENV_BASE_URL, DEFAULT_BASE_URL)

    content: list[dict] = []
    for part in request.user_parts:
        if isinstance(part, TextPart):
            content.append({"type": "text", "text": part.text})
        else:
            b64 = base64.b64encode(Path(part.path).read_bytes()).decode("ascii")
            content.append(
                {
                    "type": "image_url",
                    "image_url": {"url": f"data:{part.media_type};base64,{b64}"},
                }
            )
    payload = {
        "model": request.model,
        "messages": [
            {"role": "system", "content": request.system},
            {"role": "user", "content": content},
        ],
        "temperature": request.temperature,
        "max_tokens": request.max_output_tokens,
    }
    try:
        resp = requests.post(
            url,
            json=payload,
            headers={"Authorization": f"Bearer {api_key}"},
            timeout=120,
        )
    except requests.RequestException as exc:
        raise TransportError(f"request failed: {exc}") from exc
    if resp.status_code in (401, 403):
        raise AuthError(f"provider rejected credentials (HTTP {resp.status_code})")
    if resp.status_code >= 400:
        raise TransportError(f"HTTP {resp.status_code}: {resp.text[:300]}")
    body = resp.json()
    usage = body.get("usage", {})
    return ChatResponse(
        text=body["choices"][0]["message"]["content"],
        input_tokens=int(usage.get("prompt_tokens", 0)),
        output_tokens=int(usage.get("completion_tokens", 0)),
    )


class Gateway:
    """Chat-completion front door: caching, retries, accounting.

    ``transport`` is injectable so tests can substitute a scripted model.
    The gateway is safe to call from several workers: the in-flight
    semaphore bounds concurrency and transcript/ledger writes are locked.
    """

    def __init__(
        self,
        transcript: Transcript,
        ledger: CostLedger,
        transport: Callable[[ChatRequest], ChatResponse] = http_transport,
        max_attempts: int = 3,
        backoff_s: float = 0.5,
        max_in_flight: int = 4,
    ):
        self.transcript = transcript
        self.ledger = ledger
        self.transport = transport
        self.max_attempts = max_attempts
        self.backoff_s = backoff_s
        self._gate = threading.Semaphore(max_in_flight)
        self._store_lock = threading.Lock()

    def complete(self, request: ChatRequest) -> ChatResponse:
        digest = request_digest(request)
        mode = self.transcript.mode
        if mode in ("record", "replay"):
            cached = self.transcript.get(digest)
            if cached is not None:
                self.ledger.record(request.stage_tag, request.model, cached.input_tokens, cached.output_tokens)
                return cached
            if mode == "replay":
                raise ReplayMiss(request.stage_tag, digest)
        response = self._call_with_retries(request)
        if mode == "record":
            with self._store_lock:
                self.transcript.put(digest, request.stage_tag, response)
        self.ledger.record(request.stage_tag, request.model, response.input_tokens, response.output_tokens)
        return response

    def _call_with_retries(self, request: ChatRequest) -> ChatResponse:
        last: Exception | None = None
        for attempt in range(self.max_attempts):
            try:
                with self._gate:
                    return self.transport(request)
            except AuthError:
                raise
            except TransportError as exc:
                last = exc
                if attempt + 1 < self.max_attempts:
                    time.sleep(self.backoff_s * 2**attempt)
        raise TransportError(
            f"stage '{request.stage_tag}' failed after {self.max_attempts} attempts: {last}"
        )

    def complete_validated(
        self,
        request: ChatRequest,
        validator: Callable[[object], list[str]],
        max_retries: int = 2,
        extractor: Callable[[str], object] = extract_json,
    ):
        """complete -> extract -> validate, re-prompting with violations.

        The validator is a pure predicate returning a violation list; any
        non-empty list triggers a retry with the violations appended to the
        user content, up to ``max_retries`` re-prompts.
        """
        violations: list[str] = []
        current = request
        for _ in range(max_retries + 1):
            response = self.complete(current)
            try:
                value = extractor(response.text)
            except NoJsonFound as exc:
                violations = [str(exc)]
            else:
                violations = validator(value)
                if not violations:
                    return value
            feedback = TextPart(
                "Your previous answer violated these constraints:\n- "
                + "\n- ".join(violations)
                + "\nProduce a corrected answer that satisfies every constraint."
            )
            current = ChatRequest(
                model=request.model,
                system=request.system,
                user_parts=list(request.user_parts) + [feedback],
                stage_tag=request.stage_tag,
                temperature=request.temperature,
                max_output_tokens=request.max_output_tokens,
            )
        raise ValidationExhausted(request.stage_tag, violations)


def format_cost_rows(ledger: CostLedger) -> Iterable[tuple[str, float, float, float]]:
    """Per-stage (stage, input kilotokens, output kilotokens, cost) plus total."""
    by_stage = ledger_total(ledger, "stage")
    for stage, (tin, tout, cost) in by_stage.items():
        yield stage, tin / 1000, tout / 1000, cost
    tin, tout, cost = ledger_total(ledger, "all")["all"]
    yield "total", tin / 1000, tout / 1000, cost
