"""The `lens` command line: pipeline stages, queries, and the HTTP service."""

from __future__ import annotations

import argparse
import logging
import sys

from ..errors import LensError
from .config import load_config
from .stages import (
    run_query,
    stage_embed,
    stage_eval,
    stage_ingest,
    stage_label,
    stage_topics,
)

STAGE_COMMANDS = {
    "ingest": stage_ingest,
    "embed": stage_embed,
    "topics": stage_topics,
    "label": stage_label,
    "eval": stage_eval,
}


def summary_line(summary: dict) -> str:
    return " ".join(f"{key}={value}" for key, value in summary.items())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lens",
        description="Topic discovery, labeling, and semantic retrieval pipeline.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in [
        ("ingest", "load, clean, and chunk the corpus"),
        ("embed", "embed chunks and build the retrieval index"),
        ("topics", "reduce, cluster, and extract topic keywords"),
        ("label", "generate a label for every topic"),
        ("eval", "compute label quality metrics and the report"),
    ]:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="path to the JSON config")

    query = sub.add_parser("query", help="top-k retrieval for a text query")
    query.add_argument("--config", required=True, help="path to the JSON config")
    query.add_argument("--text", required=True, help="query text (or a topic label)")
    query.add_argument("--k", type=int, default=None, help="number of hits (default from config)")

    serve = sub.add_parser("serve", help="run the HTTP API and web UI")
    serve.add_argument("--config", required=True, help="path to the JSON config")
    serve.add_argument("--bind", default="127.0.0.1:8000", help="host:port to listen on")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )
    try:
        cfg = load_config(args.config)
        if args.command in STAGE_COMMANDS:
            summary = STAGE_COMMANDS[args.command](cfg)
            print(summary_line(summary))
            return 0
        if args.command == "query":
            k = cfg.default_k if args.k is None else args.k
            if k < 1:
                parser.error(f"--k must be >= 1, got {k}")
            result = run_query(cfg, args.text, k)
            for rank, hit in enumerate(result.hits, start=1):
                print(f"{rank}\t{hit.score:.4f}\t{hit.chunk_id}\t{hit.doc_id}\t{hit.text}")
            return 0
        if args.command == "serve":
            from .service import serve_forever

            serve_forever(cfg, args.bind)
            return 0
    except LensError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
