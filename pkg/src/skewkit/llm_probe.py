"""Zero/few-shot classification through a chat-completion provider.

Requests are fully deterministic on the client side: temperature 0, one
versioned instruction template per task, seeded demonstration selection,
and an append-only on-disk response cache keyed by a digest of
(model id, rendered prompt, temperature). A cached exchange never touches
the network, so finished experiments replay without credentials.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import metrics
from .errors import (
    AuthFailure,
    EmptyQuery,
    InsufficientData,
    ProbeFailed,
    ProviderError,
    ProviderTimeout,
    RateLimited,
)
from .tasks import TaskSpec, get_task

API_KEY_ENV = "SKEWKIT_API_KEY"


@dataclass(frozen=True)
class PromptTemplate:
    version: str
    instruction: str


# One instruction template per task, versioned so manifests pin the wording.
PROMPT_REGISTRY: dict[str, PromptTemplate] = {
    "1A": PromptTemplate(
        version="v1",
        instruction=(
            "You label Arabic text (tweets and news paragraphs) for persuasion techniques. "
            "Answer with exactly one label: 'prop' if the text uses any persuasion technique, "
            "otherwise 'non-prop'."
        ),
    ),
    "2A": PromptTemplate(
        version="v1",
        instruction=(
            "You label Arabic tweets for disinformation. "
            "Answer with exactly one label: 'disinfo' if the tweet is disinformative, "
            "otherwise 'no-disinfo'."
        ),
    ),
}


@dataclass(frozen=True)
class PromptSpec:
    """Everything that determines one rendered prompt."""

    task_id: str
    system_instruction: str
    shots: tuple[tuple[str, str], ...]
    query_text: str


@dataclass(frozen=True)
class ProviderConfig:
    """Provider settings; temperature stays 0 for reproducible runs."""

    model_id: str
    temperature: float = 0.0
    max_retries: int = 3
    timeout: float = 30.0
    rate_limit: float = 60.0  # requests per minute
    backoff_base: float = 0.5  # seconds; doubles per retry
    base_url: str = "https://api.openai.com/v1"
    api_key_env: str = API_KEY_ENV

    def to_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "temperature": self.temperature,
            "max_retries": self.max_retries,
            "timeout": self.timeout,
            "rate_limit": self.rate_limit,
            "backoff_base": self.backoff_base,
            "base_url": self.base_url,
            "api_key_env": self.api_key_env,
        }


@dataclass(frozen=True)
class LLMExchange:
    """One classified sample: rendered prompt digest, raw response, parsed label."""

    cache_key: str
    raw_response: str
    parsed_label: str | None  # None means unparseable
    latency: float
    cached: bool


def build_prompt(spec: PromptSpec) -> str:
    """Render a prompt string; byte-identical for identical specs."""
    if not spec.query_text.strip():
        raise EmptyQuery("query text is empty")
    parts = [spec.system_instruction.strip(), ""]
    for i, (text, label) in enumerate(spec.shots, start=1):
        parts.append(f"Example {i}:")
        parts.append(f"Text: {text}")
        parts.append(f"Label: {label}")
        parts.append("")
    parts.append(f"Text: {spec.query_text}")
    parts.append("Label:")
    return "\n".join(parts)


def make_prompt_spec(task_id: str, query_text: str, shots=()) -> PromptSpec:
    template = PROMPT_REGISTRY[task_id]
    return PromptSpec(
        task_id=task_id,
        system_instruction=template.instruction,
        shots=tuple((str(t), str(l)) for t, l in shots),
        query_text=query_text,
    )


def select_shots(train_split, k: int, seed: int = 0) -> list[tuple[str, str]]:
    """Stratified random demonstrations from the training split.

    Per-class counts differ by at most one; classes short of their quota
    spill deterministically into the others. Reproducible for a fixed seed.
    """
    import random

    if k == 0:
        return []
    if k > len(train_split.samples):
        raise InsufficientData(f"asked for {k} shots from {len(train_split.samples)} samples")
    rng = random.Random(seed)
    by_label: dict[str, list] = {label: [] for label in train_split.task.labels}
    for sample in train_split.samples:
        by_label[sample.label].append(sample)

    labels = list(train_split.task.labels)
    rng.shuffle(labels)
    base, remainder = divmod(k, len(labels))
    quotas = {label: base + (1 if i < remainder else 0) for i, label in enumerate(labels)}

    chosen = []
    shortfall = 0
    for label in labels:
        pool = by_label[label]
        take = min(quotas[label], len(pool))
        shortfall += quotas[label] - take
        chosen.extend(rng.sample(pool, take))
    if shortfall:
        leftovers = [s for s in train_split.samples if s not in chosen]
        chosen.extend(rng.sample(leftovers, shortfall))

    rng.shuffle(chosen)
    return [(s.text, s.label) for s in chosen]


def cache_key_for(model_id: str, prompt: str, temperature: float) -> str:
    payload = "\x1f".join([model_id, prompt, f"{temperature:.6g}"])
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class ResponseCache:
    """Append-only JSONL store of exchanges, one record per cache key.

    Safe for concurrent use within a process; records are flushed as they
    are appended so a crashed run keeps everything already paid for.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._records: dict[str, dict] = {}
        if self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    record = json.loads(line)
                    self._records[record["cache_key"]] = record

    def __len__(self) -> int:
        return len(self._records)

    def get(self, cache_key: str) -> dict | None:
        with self._lock:
            return self._records.get(cache_key)

    def put(self, record: dict) -> None:
        with self._lock:
            if record["cache_key"] in self._records:
                return
            self._records[record["cache_key"]] = record
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
                fh.flush()


class MockChatProvider:
    """In-process provider substitute honoring the HTTP provider's interface.

    ``responder`` maps a rendered prompt to a response string, or raises.
    ``failures`` injects that many transient errors before responses succeed.
    """

    def __init__(self, responder, failures: int = 0, failure_exc=ProviderTimeout):
        self.responder = responder
        self.failures = failures
        self.failure_exc = failure_exc
        self.calls = 0

    def complete(self, prompt: str, config: ProviderConfig):
        self.calls += 1
        if self.failures > 0:
            self.failures -= 1
            raise self.failure_exc("injected transient failure")
        return self.responder(prompt), {"provider": "mock"}


def extract_query(prompt: str) -> str:
    """Recover the final query text from a rendered prompt (mock helpers)."""
    tail = prompt.rsplit("Text: ", 1)[-1]
    return tail.rsplit("\nLabel:", 1)[0]


def gold_responder(split):
    """Responder that answers every prompt with the query's gold label."""
    gold = {s.text: s.label for s in split.samples}
    return lambda prompt: gold[extract_query(prompt)]


class _RateLimiter:
    def __init__(self, per_minute: float):
        self.interval = 60.0 / per_minute if per_minute > 0 else 0.0
        self._last = 0.0
        self._lock = threading.Lock()

    def wait(self) -> None:
        if self.interval <= 0:
            return
        with self._lock:
            now = time.monotonic()
            delay = self._last + self.interval - now
            if delay > 0:
                time.sleep(delay)
                now = time.monotonic()
            self._last = now


class HttpChatProvider:
    """Chat-completion endpoint client; credentials come from the environment."""

    def __init__(self, config: ProviderConfig):
        self.config = config
        self._limiter = _RateLimiter(config.rate_limit)

    def complete(self, prompt: str, config: ProviderConfig):
        import requests

        api_key = os.environ.get(config.api_key_env, "")
        if not api_key:
            raise AuthFailure(f"no credential in ${config.api_key_env}")
        self._limiter.wait()
        try:
            response = requests.post(
                f"{config.base_url.rstrip('/')}/chat/completions",
                headers={"Authorization": f"Bearer {api_key}"},
                json={
                    "model": config.model_id,
                    "temperature": config.temperature,
                    "messages": [{"role": "user", "content": prompt}],
                },
                timeout=config.timeout,
            )
        except requests.Timeout as exc:
            raise ProviderTimeout(f"request timed out after {config.timeout}s") from exc
        except requests.RequestException as exc:
            raise ProviderError(str(exc)) from exc

        if response.status_code in (401, 403):
            raise AuthFailure(f"provider rejected credentials ({response.status_code})")
        if response.status_code == 429:
            raise RateLimited("provider rate limit hit")
        if response.status_code >= 500:
            raise ProviderError(f"provider error {response.status_code}")
        try:
            data = response.json()
            text = data["choices"][0]["message"]["content"]
        except Exception as exc:
            raise ProviderError(f"malformed provider response: {exc}") from exc
        metadata = {k: v for k, v in data.items() if k != "choices"}
        return text, metadata


def classify(spec: PromptSpec, provider, config: ProviderConfig, cache: ResponseCache) -> LLMExchange:
    """Resolve one prompt through the cache, hitting the provider only on a miss.

    Transient provider failures retry with exponential backoff; after
    max_retries + 1 attempts the last error propagates. Auth failures
    never retry.
    """
    prompt = build_prompt(spec)
    key = cache_key_for(config.model_id, prompt, config.temperature)
    vocab, aliases = _vocab_and_aliases(spec.task_id)

    cached = cache.get(key)
    if cached is not None:
        return LLMExchange(
            cache_key=key,
            raw_response=cached["raw_response"],
            parsed_label=parse_label(cached["raw_response"], vocab, aliases),
            latency=0.0,
            cached=True,
        )

    last_error: Exception | None = None
    for attempt in range(config.max_retries + 1):
        if attempt > 0 and config.backoff_base > 0:
            time.sleep(config.backoff_base * 2 ** (attempt - 1))
        try:
            started = time.perf_counter()
            raw, metadata = provider.complete(prompt, config)
            latency = time.perf_counter() - started
            break
        except AuthFailure:
            raise
        except ProviderError as exc:
            last_error = exc
    else:
        raise last_error if last_error is not None else ProviderError("no attempts made")

    cache.put(
        {
            "cache_key": key,
            "model_id": config.model_id,
            "temperature": config.temperature,
            "prompt": prompt,
            "raw_response": raw,
            "latency": latency,
            "provider_metadata": metadata,
            "created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        }
    )
    return LLMExchange(
        cache_key=key,
        raw_response=raw,
        parsed_label=parse_label(raw, vocab, aliases),
        latency=latency,
        cached=False,
    )


def _vocab_and_aliases(task_id: str):
    task = get_task(task_id)
    return task.labels, task.aliases


def parse_label(raw_response: str, vocab, aliases: dict[str, tuple[str, ...]] | None = None) -> str | None:
    """Map free-text model output onto a vocabulary label.

    Case-insensitive whole-token search over labels and their registered
    aliases; the earliest match wins, longer matches beating shorter ones
    at the same position. Returns None when nothing matches (unparseable).
    """
    candidates: list[tuple[str, str]] = []
    for i, label in enumerate(vocab):
        candidates.append((label, label))
        for alias in (aliases or {}).get(label, ()):
            candidates.append((alias, label))

    best: tuple[int, int, int] | None = None
    best_label = None
    for order, (needle, label) in enumerate(candidates):
        pattern = re.compile(rf"(?<![\w-]){re.escape(needle)}(?![\w-])", re.IGNORECASE)
        match = pattern.search(raw_response)
        if match is None:
            continue
        rank = (match.start(), -len(needle), order)
        if best is None or rank < best:
            best = rank
            best_label = label
    return best_label


@dataclass
class ProbeRecord:
    sample_id: str
    gold: str
    predicted: str
    parsed: str | None
    fallback_used: bool
    cached: bool
    error: str | None = None


@dataclass
class ProbeReport:
    """Outcome of probing one split: scores plus a per-sample audit trail."""

    task_id: str
    shots: int
    result: metrics.EvalResult
    records: list[ProbeRecord] = field(default_factory=list)
    errors: int = 0

    def table_row(self) -> tuple[str, str, float, float]:
        return (self.task_id, f"{self.shots}-shot", self.result.micro_f1, self.result.macro_f1)


def run_probe(
    task_id: str,
    split,
    k: int,
    provider,
    config: ProviderConfig,
    cache: ResponseCache,
    train_split=None,
    seed: int = 0,
    max_error_fraction: float = 0.0,
) -> ProbeReport:
    """Classify every sample of a split and score the result.

    Demonstrations (k > 0) come from the training split only. Unparseable
    responses and provider failures fall back to the majority class of the
    training split; the run aborts when the errored fraction exceeds
    ``max_error_fraction``.
    """
    task = get_task(task_id)
    if k > 0 and train_split is None:
        raise InsufficientData("few-shot probing needs a training split for demonstrations")
    shots = select_shots(train_split, k, seed) if k > 0 else []

    majority = _majority_label(train_split if train_split is not None else split, task)
    records: list[ProbeRecord] = []
    errors = 0
    for sample in split.samples:
        spec = make_prompt_spec(task_id, sample.text, shots)
        parsed: str | None = None
        cached = False
        error: str | None = None
        try:
            exchange = classify(spec, provider, config, cache)
            parsed = exchange.parsed_label
            cached = exchange.cached
        except ProviderError as exc:
            errors += 1
            error = f"{type(exc).__name__}: {exc}"
        predicted = parsed if parsed is not None else majority
        records.append(
            ProbeRecord(
                sample_id=sample.id,
                gold=sample.label,
                predicted=predicted,
                parsed=parsed,
                fallback_used=parsed is None,
                cached=cached,
                error=error,
            )
        )

    if errors > max_error_fraction * len(split.samples):
        raise ProbeFailed(
            f"{errors}/{len(split.samples)} samples failed at the provider "
            f"(allowed fraction {max_error_fraction})"
        )

    result = metrics.evaluate(
        [r.gold for r in records], [r.predicted for r in records], task.labels
    )
    return ProbeReport(task_id=task_id, shots=k, result=result, records=records, errors=errors)


def _majority_label(split, task: TaskSpec) -> str:
    counts = {label: 0 for label in task.labels}
    for sample in split.samples:
        counts[sample.label] += 1
    # stable tie-break: vocabulary order
    return max(task.labels, key=lambda label: counts[label])
