"""Corpus loading, text cleaning, sentence splitting, and word-limited chunking.

The corpus format is a directory of UTF-8 JSON files, each an object with a
string "Text" field (all other fields are ignored).  Every document is cleaned,
split into sentences, and regrouped into chunks whose IDs follow the
"<doc_id>_chunk<i>" scheme so each retrieval unit stays traceable to its
source file.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

logger = logging.getLogger(__name__)

# Punctuation that survives cleaning.  Sentence-terminal marks must be kept or
# the splitter downstream has nothing to work with.
KEPT_PUNCTUATION = frozenset(".,;:!?'\"()-%")

_TERMINAL_RUN = re.compile(r"([.!?])\1+")

# Lowercase tokens (including their trailing period) that never end a sentence.
ABBREVIATIONS = frozenset(
    {"u.s.", "dr.", "mr.", "mrs.", "e.g.", "i.e.", "no.", "vs."}
)


@dataclass(frozen=True)
class Document:
    """A source file reduced to its cleaned text."""

    doc_id: str
    raw_text: str
    clean_text: str


@dataclass(frozen=True)
class Chunk:
    """A word-limited group of consecutive sentences from one document."""

    doc_id: str
    chunk_index: int
    chunk_id: str
    text: str
    word_count: int


@dataclass(frozen=True)
class ChunkingConfig:
    word_limit: int = 120

    def __post_init__(self) -> None:
        if self.word_limit < 1:
            raise ValueError(f"word_limit must be >= 1, got {self.word_limit}")


@dataclass
class CorpusLoad:
    """Documents plus an auditable record of everything that was skipped."""

    documents: list[Document] = field(default_factory=list)
    skipped_missing_text: int = 0
    skipped_malformed: int = 0

    @property
    def skipped(self) -> int:
        return self.skipped_missing_text + self.skipped_malformed


def clean_text(raw: str) -> str:
    """Normalize raw document text.

    Lowercases, maps every whitespace run to a single space, drops control and
    replacement characters, keeps letters/digits plus KEPT_PUNCTUATION, and
    collapses repeated terminal punctuation ("!!!" -> "!").  Idempotent.
    """
    kept: list[str] = []
    for ch in raw.lower():
        if ch.isspace():
            kept.append(" ")
        elif ch.isalnum() or ch in KEPT_PUNCTUATION:
            kept.append(ch)
        # Everything else (symbols, control chars, U+FFFD) is dropped.
    collapsed = _TERMINAL_RUN.sub(r"\1", "".join(kept))
    return " ".join(collapsed.split())


def split_sentences(text: str) -> list[str]:
    """Split cleaned text at sentence boundaries.

    A boundary is one of ``. ! ?`` followed by a space or end-of-text, unless
    the terminating token is a known abbreviation.  Decimal points never match
    because the character after them is a digit.  Joining the result with
    single spaces reconstructs the input exactly.
    """
    sentences: list[str] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in ".!?" and (i + 1 == n or text[i + 1] == " "):
            if ch == "." and _token_ending_at(text, i) in ABBREVIATIONS:
                i += 1
                continue
            sentences.append(text[start : i + 1])
            start = i + 2  # skip the single separating space
            i += 2
            continue
        i += 1
    if start < n:
        sentences.append(text[start:])
    return sentences


def _token_ending_at(text: str, i: int) -> str:
    """The whitespace-delimited token whose last character is text[i]."""
    j = text.rfind(" ", 0, i) + 1
    return text[j : i + 1]


def chunk_document(doc: Document, cfg: ChunkingConfig) -> list[Chunk]:
    """Group a document's sentences into chunks of at most cfg.word_limit words.

    A chunk closes when appending the next sentence would push it past the
    limit; a single sentence longer than the limit forms its own oversized
    chunk.  Chunk texts joined with single spaces reconstruct clean_text.
    """
    if not doc.clean_text:
        raise ValueError(f"document {doc.doc_id!r} has empty clean_text")
    chunks: list[Chunk] = []
    current: list[str] = []
    current_words = 0

    def close() -> None:
        nonlocal current, current_words
        if not current:
            return
        index = len(chunks) + 1
        text = " ".join(current)
        chunks.append(
            Chunk(
                doc_id=doc.doc_id,
                chunk_index=index,
                chunk_id=f"{doc.doc_id}_chunk{index}",
                text=text,
                word_count=current_words,
            )
        )
        current = []
        current_words = 0

    for sentence in split_sentences(doc.clean_text):
        words = len(sentence.split())
        if current and current_words + words > cfg.word_limit:
            close()
        current.append(sentence)
        current_words += words
    close()
    return chunks


def load_corpus(dir_path: str | Path) -> CorpusLoad:
    """Load every JSON file in a directory into Documents.

    Files are visited in lexicographic filename order.  Files with no usable
    "Text" field are counted in skipped_missing_text; files that fail to parse
    are counted in skipped_malformed.  Neither is fatal.
    """
    root = Path(dir_path)
    if not root.is_dir():
        raise FileNotFoundError(f"corpus directory not readable: {root}")
    result = CorpusLoad()
    for path in sorted(root.glob("*.json"), key=lambda p: p.name):
        try:
            obj = json.loads(path.read_text(encoding="utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            logger.warning("skipping malformed JSON file %s: %s", path.name, exc)
            result.skipped_malformed += 1
            continue
        text = obj.get("Text") if isinstance(obj, dict) else None
        if not isinstance(text, str) or not clean_text(text):
            result.skipped_missing_text += 1
            continue
        result.documents.append(
            Document(doc_id=path.stem, raw_text=text, clean_text=clean_text(text))
        )
    return result


def chunk_corpus(documents: Iterable[Document], cfg: ChunkingConfig) -> list[Chunk]:
    """Chunk documents in lexicographic doc_id order.

    Per-document chunking is a pure function, so any parallel execution must
    merge in this order to keep output byte-stable.
    """
    chunks: list[Chunk] = []
    for doc in sorted(documents, key=lambda d: d.doc_id):
        chunks.extend(chunk_document(doc, cfg))
    return chunks


def parse_chunk_id(chunk_id: str) -> tuple[str, int]:
    """Invert the "<doc_id>_chunk<i>" scheme."""
    doc_id, _, index = chunk_id.rpartition("_chunk")
    if not doc_id or not index.isdigit():
        raise ValueError(f"not a valid chunk_id: {chunk_id!r}")
    return doc_id, int(index)


def write_chunks_jsonl(chunks: Iterable[Chunk], path: str | Path) -> int:
    """Dump chunks as JSON Lines; returns the number written."""
    count = 0
    with Path(path).open("w", encoding="utf-8") as fh:
        for chunk in chunks:
            row = {
                "doc_id": chunk.doc_id,
                "chunk_id": chunk.chunk_id,
                "chunk_index": chunk.chunk_index,
                "text": chunk.text,
                "word_count": chunk.word_count,
            }
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
            count += 1
    return count


def read_chunks_jsonl(path: str | Path) -> list[Chunk]:
    chunks: list[Chunk] = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            chunks.append(
                Chunk(
                    doc_id=row["doc_id"],
                    chunk_index=row["chunk_index"],
                    chunk_id=row["chunk_id"],
                    text=row["text"],
                    word_count=row["word_count"],
                )
            )
    return chunks
