"""Read-only HTTP service over a built project: health, topics, report, query.

Pipeline mutation stays CLI-only; the service loads the index, topic set,
labels, and report once at startup and serves them immutably, so concurrent
requests need no locking.  The web UI's static build is served at / when its
directory exists; the API works without it.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from ..embed import ProviderConfig, embed_texts
from ..errors import EmptyIndexError, LensError
from ..index import Query, VectorIndex
from ..label import load_labels
from ..topics import TopicSet, load_topic_set
from .config import PipelineConfig
from .manifest import Manifest
from .stages import INDEX_FILE, LABELS_FILE, REPORT_FILE, TOPICS_FILE

logger = logging.getLogger("textlens.service")

MAX_K = 100

_FALLBACK_PAGE = """<!doctype html>
<html><head><title>lens</title></head>
<body>
<h1>lens API</h1>
<p>No web UI build found. The JSON API is available under <code>/api/</code>:
GET /api/health, GET /api/topics, GET /api/report, POST /api/query.</p>
</body></html>
"""


@dataclass
class ProjectData:
    index: VectorIndex
    topics: TopicSet | None
    labels: dict[int, dict]
    report: dict | None
    provider: ProviderConfig
    default_k: int
    static_dir: Path | None


def load_project(cfg: PipelineConfig) -> ProjectData:
    """Load everything the service needs; the index is mandatory."""
    manifest = Manifest.load(cfg.work_dir)
    manifest.require("embed")
    index = VectorIndex.load(cfg.work_dir / INDEX_FILE)

    topics = None
    topics_path = cfg.work_dir / TOPICS_FILE
    if topics_path.exists():
        topics = load_topic_set(topics_path)
    labels: dict[int, dict] = {}
    labels_path = cfg.work_dir / LABELS_FILE
    if labels_path.exists():
        labels = load_labels(labels_path)
    report = None
    report_path = cfg.work_dir / REPORT_FILE
    if report_path.exists():
        import json

        report = json.loads(report_path.read_text(encoding="utf-8"))
    return ProjectData(
        index=index,
        topics=topics,
        labels=labels,
        report=report,
        provider=cfg.retrieval_stage,
        default_k=cfg.default_k,
        static_dir=cfg.static_dir,
    )


class QueryRequest(BaseModel):
    query: str
    k: int | None = None


def create_app(project: ProjectData) -> FastAPI:
    app = FastAPI(title="lens", docs_url=None, redoc_url=None)

    @app.middleware("http")
    async def log_requests(request: Request, call_next):
        started = time.perf_counter()
        response = await call_next(request)
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        logger.info(
            "method=%s path=%s status=%d ms=%.1f",
            request.method,
            request.url.path,
            response.status_code,
            elapsed_ms,
        )
        return response

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": "validation_error", "detail": str(exc.errors())},
        )

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok", "index_size": len(project.index)}

    @app.get("/api/topics")
    def topics() -> list[dict]:
        if project.topics is None:
            return []
        rows = []
        for topic in project.topics.topics:  # already frequency-descending
            label_row = project.labels.get(topic.topic_id)
            rows.append(
                {
                    "topic_id": topic.topic_id,
                    "label": label_row["label"] if label_row else None,
                    "frequency": topic.frequency,
                    "keywords": topic.keyword_terms(),
                }
            )
        return rows

    @app.get("/api/report")
    def report():
        if project.report is None:
            return JSONResponse(
                status_code=404,
                content={"error": "not_found", "detail": "no eval report built yet"},
            )
        return project.report

    @app.post("/api/query")
    def query(body: QueryRequest):
        text = body.query.strip()
        if not text:
            return JSONResponse(
                status_code=400,
                content={"error": "bad_query", "detail": "query must be non-empty"},
            )
        k = project.default_k if body.k is None else body.k
        if k < 1:
            return JSONResponse(
                status_code=400,
                content={"error": "bad_query", "detail": "k must be >= 1"},
            )
        k = min(k, MAX_K)
        try:
            vector = embed_texts(project.provider, [text])[0]
            result = project.index.search(Query(text=text, vector=vector, k=k))
        except EmptyIndexError:
            return JSONResponse(
                status_code=400,
                content={"error": "empty_index", "detail": "the index has no entries"},
            )
        except LensError as exc:
            return JSONResponse(
                status_code=502,
                content={"error": "provider_error", "detail": str(exc)},
            )
        return {
            "hits": [
                {
                    "chunk_id": hit.chunk_id,
                    "doc_id": hit.doc_id,
                    "score": hit.score,
                    "text": hit.text,
                }
                for hit in result.hits
            ]
        }

    if project.static_dir is not None and project.static_dir.is_dir():
        app.mount(
            "/", StaticFiles(directory=str(project.static_dir), html=True), name="ui"
        )
    else:

        @app.get("/", response_class=HTMLResponse)
        def fallback_root() -> str:
            return _FALLBACK_PAGE

    return app


def serve_forever(cfg: PipelineConfig, bind: str) -> None:
    """Blocking uvicorn server; uvicorn drains in-flight requests on SIGTERM."""
    import uvicorn

    host, _, port_text = bind.rpartition(":")
    if not host or not port_text.isdigit():
        raise ValueError(f"--bind must look like host:port, got {bind!r}")
    app = create_app(load_project(cfg))
    uvicorn.run(app, host=host, port=int(port_text), log_level="info")
