"""HTTP API over a built fixture project (in-process TestClient, no sockets)."""

from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from textlens.app.config import load_config
from textlens.app.service import create_app, load_project
from textlens.app.stages import run_pipeline, run_query
from textlens.errors import PrerequisiteError


@pytest.fixture(scope="module")
def project_client(tmp_path_factory):
    tmp_path = tmp_path_factory.mktemp("svc")
    from conftest import CORPUS60

    config_path = tmp_path / "config.json"
    config_path.write_text(
        json.dumps(
            {
                "corpus_dir": str(CORPUS60.resolve()),
                "work_dir": str(tmp_path / "work"),
                "chunking": {"word_limit": 40},
                "reducer": {"method": "pca", "target_dim": 5, "random_seed": 0},
                "hdbscan": {"min_cluster_size": 10},
            }
        )
    )
    cfg = load_config(config_path)
    run_pipeline(cfg)
    client = TestClient(create_app(load_project(cfg)))
    return cfg, client


class TestHealth:
    def test_health(self, project_client):
        _, client = project_client
        body = client.get("/api/health").json()
        assert body == {"status": "ok", "index_size": 60}


class TestTopics:
    def test_topics_sorted_by_frequency(self, project_client):
        _, client = project_client
        rows = client.get("/api/topics").json()
        assert len(rows) >= 2
        frequencies = [row["frequency"] for row in rows]
        assert frequencies == sorted(frequencies, reverse=True)
        for row in rows:
            assert set(row) == {"topic_id", "label", "frequency", "keywords"}
            assert isinstance(row["keywords"], list)
            assert row["label"]  # labeled project


class TestReport:
    def test_report_served(self, project_client):
        _, client = project_client
        body = client.get("/api/report").json()
        assert "per_topic" in body and "means" in body

    def test_report_404_when_missing(self, tmp_path):
        from conftest import CORPUS60
        from textlens.app.stages import stage_embed, stage_ingest

        config_path = tmp_path / "config.json"
        config_path.write_text(
            json.dumps(
                {
                    "corpus_dir": str(CORPUS60.resolve()),
                    "work_dir": str(tmp_path / "work"),
                    "chunking": {"word_limit": 40},
                }
            )
        )
        cfg = load_config(config_path)
        stage_ingest(cfg)
        stage_embed(cfg)
        client = TestClient(create_app(load_project(cfg)))
        response = client.get("/api/report")
        assert response.status_code == 404
        assert response.json()["error"] == "not_found"
        # topics not built either: the endpoint degrades to an empty list
        assert client.get("/api/topics").json() == []


class TestQuery:
    def test_query_hits_shape(self, project_client):
        _, client = project_client
        body = client.post(
            "/api/query", json={"query": "tractor engines", "k": 5}
        ).json()
        assert len(body["hits"]) == 5
        scores = [h["score"] for h in body["hits"]]
        assert scores == sorted(scores, reverse=True)
        assert set(body["hits"][0]) == {"chunk_id", "doc_id", "score", "text"}

    def test_api_cli_parity(self, project_client):
        cfg, client = project_client
        api_hits = client.post(
            "/api/query", json={"query": "wheat harvest prices", "k": 4}
        ).json()["hits"]
        cli_hits = run_query(cfg, "wheat harvest prices", 4).hits
        assert [(h["chunk_id"], h["score"]) for h in api_hits] == [
            (h.chunk_id, h.score) for h in cli_hits
        ]

    def test_default_k_from_config(self, project_client):
        cfg, client = project_client
        body = client.post("/api/query", json={"query": "grain"}).json()
        assert len(body["hits"]) == cfg.default_k

    def test_blank_query_rejected(self, project_client):
        _, client = project_client
        response = client.post("/api/query", json={"query": "   "})
        assert response.status_code == 400
        assert response.json()["error"] == "bad_query"

    def test_k_below_one_rejected(self, project_client):
        _, client = project_client
        response = client.post("/api/query", json={"query": "x", "k": 0})
        assert response.status_code == 400

    def test_k_capped_at_100(self, project_client):
        _, client = project_client
        body = client.post("/api/query", json={"query": "grain", "k": 5000}).json()
        assert len(body["hits"]) == 60  # whole index, not 5000

    def test_malformed_body_is_400_json(self, project_client):
        _, client = project_client
        response = client.post("/api/query", json={"k": 3})
        assert response.status_code == 400
        body = response.json()
        assert body["error"] == "validation_error"
        assert "detail" in body


class TestRoot:
    def test_fallback_page_without_webui_build(self, project_client):
        _, client = project_client
        response = client.get("/")
        assert response.status_code == 200
        assert "lens" in response.text

    def test_static_dir_served_when_present(self, tmp_path, project_client):
        cfg, _ = project_client
        static = tmp_path / "dist"
        static.mkdir()
        (static / "index.html").write_text("<html><body>ui build</body></html>")
        project = load_project(cfg)
        project.static_dir = static
        client = TestClient(create_app(project))
        assert "ui build" in client.get("/").text


class TestLoadProject:
    def test_requires_embed_stage(self, tmp_path):
        from conftest import CORPUS60

        config_path = tmp_path / "config.json"
        config_path.write_text(
            json.dumps(
                {"corpus_dir": str(CORPUS60.resolve()), "work_dir": str(tmp_path / "w")}
            )
        )
        cfg = load_config(config_path)
        with pytest.raises(PrerequisiteError, match="lens embed"):
            load_project(cfg)
