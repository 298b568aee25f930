#!/usr/bin/env python3
"""Generate the committed 60-chunk fixture corpus.

Ten documents, two vocabulary families (grain markets vs farm machinery),
twelve 20-word sentences per document.  With word_limit=40 each document
chunks into six 2-sentence chunks: 60 chunks total, 30 per family.  The two
families share no content vocabulary, so the deterministic hash embedder
separates them into two clusters.

The raw text carries deliberate noise (uppercase, doubled spaces, a "!!!"
sentence) that the cleaning stage must normalize away.  Output is fully
deterministic; rerunning the script reproduces the same bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "corpus60"

MARKET_WORDS = [
    "wheat", "corn", "prices", "market", "harvest", "grain", "exports",
    "bushel", "futures", "crop", "yields", "farmers", "soybean", "demand",
    "supply", "barley", "acreage", "drought", "rainfall", "commodity",
    "trade", "tariff", "storage", "silo", "planting", "contracts",
]
MACHINE_WORDS = [
    "tractor", "engine", "diesel", "hydraulic", "transmission", "horsepower",
    "equipment", "loader", "maintenance", "repair", "gearbox", "axle",
    "torque", "cylinder", "piston", "clutch", "chassis", "throttle",
    "radiator", "filter", "lubricant", "assembly", "dealership", "warranty",
    "baler", "overhaul",
]

SENTENCES_PER_DOC = 12
WORDS_PER_SENTENCE = 20
DOCS_PER_FAMILY = 5


def make_sentence(pool: list[str], doc_index: int, sentence_index: int) -> str:
    words = [
        pool[(sentence_index * 7 + j * 3 + doc_index) % len(pool)]
        for j in range(WORDS_PER_SENTENCE)
    ]
    terminal = "!!!" if sentence_index == 5 else "."
    # Noise for the cleaner: capitalize the lead word, upper-case another.
    words[0] = words[0].capitalize()
    words[10] = words[10].upper()
    return " ".join(words) + terminal


def make_doc_text(pool: list[str], doc_index: int) -> str:
    sentences = [
        make_sentence(pool, doc_index, s) for s in range(SENTENCES_PER_DOC)
    ]
    # Doubled space after the third sentence; the cleaner collapses it.
    return " ".join(sentences[:3]) + "  " + " ".join(sentences[3:])


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    for family, pool in (("market", MARKET_WORDS), ("machine", MACHINE_WORDS)):
        for d in range(DOCS_PER_FAMILY):
            doc_id = f"{family}{d + 1:02d}"
            payload = {
                "Title": f"fixture document {doc_id}",
                "Source": "synthetic",
                "Text": make_doc_text(pool, d),
            }
            path = OUT_DIR / f"{doc_id}.json"
            path.write_text(
                json.dumps(payload, indent=2, ensure_ascii=False) + "\n",
                encoding="utf-8",
            )
    print(f"wrote {2 * DOCS_PER_FAMILY} documents to {OUT_DIR}")


if __name__ == "__main__":
    main()
