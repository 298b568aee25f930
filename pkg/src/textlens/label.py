"""Zero-shot topic labeling: structured prompts plus a generation client.

A prompt is the instruction, the topic's keywords, and its representative
snippets concatenated in that fixed order.  Completions are post-processed
into short single-line title-case labels.  The stub provider needs no network
or weights: it derives a label from the prompt's keyword line, which also
serves as the fallback when a remote call fails, so one flaky completion
never aborts a full labeling run.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Mapping

from ._http import Transport, post_json_with_retries
from .errors import GenerationError, LensError, MissingChunkError
from .topics import Topic, TopicSet

STUB_KIND = "stub"
REMOTE_CHAT_KIND = "remote-chat"

DEFAULT_INSTRUCTION = (
    "You label topics. Given keywords and example snippets from one topic, "
    "reply with only a short, domain-relevant, human-readable topic label "
    "of at most 8 words."
)

_EDGE_STRIP = " \t\"'`*_#"


@dataclass(frozen=True)
class PromptTemplate:
    instruction: str = DEFAULT_INSTRUCTION
    max_label_words: int = 8
    snippet_words: int = 60  # per-snippet truncation bound for small-context models

    def __post_init__(self) -> None:
        if self.max_label_words < 1:
            raise ValueError(f"max_label_words must be >= 1, got {self.max_label_words}")
        if self.snippet_words < 1:
            raise ValueError(f"snippet_words must be >= 1, got {self.snippet_words}")


@dataclass(frozen=True)
class GenProviderConfig:
    kind: str = STUB_KIND
    endpoint_url: str = ""
    model_name: str = "stub"
    temperature: float = 0.0
    timeout: float = 60.0
    max_retries: int = 3
    max_concurrency: int = 1  # in-flight request cap for remote labeling
    api_key: str = ""

    def __post_init__(self) -> None:
        if self.kind not in (STUB_KIND, REMOTE_CHAT_KIND):
            raise ValueError(f"unknown generation provider kind: {self.kind!r}")
        if self.temperature < 0.0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")
        if self.max_concurrency < 1:
            raise ValueError(f"max_concurrency must be >= 1, got {self.max_concurrency}")
        if self.kind == REMOTE_CHAT_KIND and not self.endpoint_url:
            raise ValueError("remote-chat provider requires endpoint_url")


@dataclass
class TopicLabel:
    topic_id: int
    label: str
    prompt_used: str
    provider_name: str
    created_at: datetime = field(
        default_factory=lambda: datetime.now(timezone.utc)
    )
    flagged: bool = False  # True when the provider failed and the stub filled in


def truncate_words(text: str, limit: int) -> str:
    words = text.split()
    return " ".join(words[:limit])


def render_prompt(
    topic: Topic, chunks_by_id: Mapping[str, str], tmpl: PromptTemplate
) -> str:
    """Instruction, then "Keywords: ...", then "Snippets:" lines, in order."""
    snippets = []
    for chunk_id in topic.representative_chunk_ids:
        if chunk_id not in chunks_by_id:
            raise MissingChunkError(f"representative chunk not found: {chunk_id}")
        snippets.append(truncate_words(chunks_by_id[chunk_id], tmpl.snippet_words))
    keyword_line = ", ".join(topic.keyword_terms())
    snippet_block = "\n".join(snippets)
    return f"{tmpl.instruction}\n\nKeywords: {keyword_line}\n\nSnippets:\n{snippet_block}"


def postprocess_label(raw: str, max_label_words: int) -> str:
    """First line only, markdown/quote edges stripped, title case, word-capped.

    Idempotent; raises GenerationError when nothing usable remains.
    """
    lines = [line for line in raw.strip().splitlines() if line.strip()]
    if not lines:
        raise GenerationError("provider returned an empty completion")
    label = lines[0].strip(_EDGE_STRIP)
    words = label.split()[:max_label_words]
    # Upper-case the first letter of each word, leave the rest alone
    # (str.title() would mangle apostrophes).
    titled = [w[:1].upper() + w[1:] for w in words]
    label = " ".join(titled)
    if not label:
        raise GenerationError("completion empty after post-processing")
    return label


def stub_completion(prompt: str) -> str:
    """Deterministic offline label: the prompt's first three keywords."""
    for line in prompt.splitlines():
        if line.startswith("Keywords:"):
            terms = [t.strip() for t in line[len("Keywords:") :].split(",")]
            terms = [t for t in terms if t][:3]
            if terms:
                return " ".join(terms)
    return "untitled topic"


class RemoteChatClient:
    """Single-turn chat-completions client (messages list, temperature)."""

    def __init__(
        self,
        config: GenProviderConfig,
        transport: Transport | None = None,
        sleep: Callable[[float], None] = time.sleep,
        rng: random.Random | None = None,
    ):
        self.config = config
        self._transport = transport
        self._sleep = sleep
        self._rng = rng

    def complete(self, prompt: str) -> str:
        headers = {}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        body = post_json_with_retries(
            self.config.endpoint_url,
            {
                "model": self.config.model_name,
                "messages": [{"role": "user", "content": prompt}],
                "temperature": self.config.temperature,
            },
            headers=headers,
            timeout=self.config.timeout,
            max_retries=self.config.max_retries,
            transport=self._transport,
            sleep=self._sleep,
            rng=self._rng,
        )
        try:
            content = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            raise GenerationError(f"malformed chat completion response: {body!r}")
        if not isinstance(content, str) or not content.strip():
            raise GenerationError("provider returned an empty completion")
        return content


def generate_label(
    provider: GenProviderConfig,
    prompt: str,
    *,
    max_label_words: int = 8,
    transport: Transport | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> str:
    """One post-processed label for a rendered prompt."""
    if not prompt:
        raise ValueError("prompt must be non-empty")
    if provider.kind == STUB_KIND:
        raw = stub_completion(prompt)
    else:
        raw = RemoteChatClient(provider, transport=transport, sleep=sleep).complete(prompt)
    return postprocess_label(raw, max_label_words)


def label_topic_set(
    topic_set: TopicSet,
    provider: GenProviderConfig,
    tmpl: PromptTemplate,
    chunks_by_id: Mapping[str, str],
    *,
    transport: Transport | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> list[TopicLabel]:
    """Label every topic, order preserved; per-topic failures fall back to the
    stub label and are flagged instead of aborting the run.

    Remote labeling fans out up to provider.max_concurrency in-flight calls;
    results are collected by topic position, never by completion order.
    """

    def label_one(topic: Topic) -> TopicLabel:
        prompt = render_prompt(topic, chunks_by_id, tmpl)
        flagged = False
        provider_name = provider.model_name
        try:
            text = generate_label(
                provider,
                prompt,
                max_label_words=tmpl.max_label_words,
                transport=transport,
                sleep=sleep,
            )
        except LensError:
            text = postprocess_label(stub_completion(prompt), tmpl.max_label_words)
            flagged = True
            provider_name = f"{provider.model_name}+stub-fallback"
        return TopicLabel(
            topic_id=topic.topic_id,
            label=text,
            prompt_used=prompt,
            provider_name=provider_name,
            flagged=flagged,
        )

    if (
        provider.kind == REMOTE_CHAT_KIND
        and provider.max_concurrency > 1
        and len(topic_set.topics) > 1
    ):
        from concurrent.futures import ThreadPoolExecutor

        workers = min(provider.max_concurrency, len(topic_set.topics))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(label_one, topic_set.topics))
    return [label_one(topic) for topic in topic_set.topics]


def labels_to_dict(labels: list[TopicLabel]) -> list[dict]:
    return [
        {"topic_id": lb.topic_id, "label": lb.label, "flagged": lb.flagged}
        for lb in labels
    ]


def save_labels(labels: list[TopicLabel], path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(labels_to_dict(labels), indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def load_labels(path: str | Path) -> dict[int, dict]:
    """Labels keyed by topic_id: {topic_id: {"label": ..., "flagged": ...}}."""
    rows = json.loads(Path(path).read_text(encoding="utf-8"))
    return {row["topic_id"]: row for row in rows}
