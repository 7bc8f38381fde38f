import json

import pytest
from fastapi.testclient import TestClient

from greylit.service.api import create_app, parse_options

from service_env import MODE, build_service, prepared_run


@pytest.fixture
def api(tmp_path):
    service, run_id = prepared_run(tmp_path)
    app = create_app(service, background=False)
    return TestClient(app), service, run_id


def create_body(sources=("github_repos", "stackoverflow")):
    return {
        "prompt": "flaky test detection in continuous integration",
        "options": {
            "sources": list(sources),
            "query_count": len(sources),
            "embedding_model_id": MODE,
            "embedding_dims": 512,
        },
    }


class TestParseOptions:
    def test_full_document(self):
        options = parse_options({
            "sources": ["websearch"], "query_count": 3,
            "date_range": ["2022-01-01", "2024-01-01"],
            "languages": ["python"], "llm_temperature": 0.5,
        })
        assert options.query_count == 3
        assert options.date_range[0].year == 2022
        assert options.llm_temperature == 0.5

    def test_defaults_apply(self):
        options = parse_options({"sources": ["websearch"], "query_count": 1})
        assert options.embedding_dims == 1536


class TestRunEndpoints:
    def test_create_returns_planned_run(self, tmp_path):
        service, _, _ = build_service(tmp_path)
        client = TestClient(create_app(service, background=False))
        resp = client.post("/runs", json=create_body())
        assert resp.status_code == 201
        body = resp.json()
        assert body["status"] == "planning"
        assert len(body["bundle"]["queries"]) == 2

    def test_create_without_prompt_is_400(self, tmp_path):
        service, _, _ = build_service(tmp_path)
        client = TestClient(create_app(service, background=False))
        resp = client.post("/runs", json={"prompt": "  ",
                                          "options": {"sources": ["websearch"],
                                                      "query_count": 1}})
        assert resp.status_code == 400

    def test_get_run(self, api):
        client, _, run_id = api
        resp = client.get(f"/runs/{run_id}")
        assert resp.status_code == 200
        assert resp.json()["run_id"] == run_id

    def test_unknown_run_is_404(self, api):
        client, _, _ = api
        assert client.get("/runs/nope").status_code == 404
        assert client.post("/runs/nope/start").status_code == 404

    def test_start_runs_pipeline_inline(self, api):
        client, _, run_id = api
        resp = client.post(f"/runs/{run_id}/start")
        assert resp.status_code == 202
        assert resp.json()["status"] == "complete"


class TestQueryEndpoints:
    def test_get_and_put(self, api):
        client, _, run_id = api
        doc = client.get(f"/runs/{run_id}/queries").json()
        assert len(doc["queries"]) == 2
        doc["queries"][0]["terms"] = ["flaky tests rerun strategy"]
        resp = client.put(f"/runs/{run_id}/queries", json=doc)
        assert resp.status_code == 200
        assert resp.json()["queries"][0]["origin"] == "user_edited"

    def test_put_invalid_is_400(self, api):
        client, _, run_id = api
        doc = client.get(f"/runs/{run_id}/queries").json()
        doc["queries"][0]["source"] = "usenet"
        assert client.put(f"/runs/{run_id}/queries",
                          json=doc).status_code == 400

    def test_put_after_start_is_409(self, api):
        client, _, run_id = api
        doc = client.get(f"/runs/{run_id}/queries").json()
        client.post(f"/runs/{run_id}/start")
        assert client.put(f"/runs/{run_id}/queries",
                          json=doc).status_code == 409


class TestResultsLabelsExport:
    def complete(self, api):
        client, service, run_id = api
        client.post(f"/runs/{run_id}/start")
        return client, run_id

    def test_views_and_filters(self, api):
        client, run_id = self.complete(api)
        relevant = client.get(f"/runs/{run_id}/results").json()
        everything = client.get(f"/runs/{run_id}/results",
                                params={"view": "all"}).json()
        assert relevant["total"] == 2
        assert everything["total"] == 4
        repos = client.get(
            f"/runs/{run_id}/results",
            params={"view": "all", "source": "github_repos"},
        ).json()
        assert repos["total"] == 2
        assert client.get(f"/runs/{run_id}/results",
                          params={"view": "bogus"}).status_code == 400

    def test_results_before_completion_is_409(self, api):
        client, _, run_id = api
        assert client.get(f"/runs/{run_id}/results").status_code == 409

    def test_label_flow(self, api):
        client, run_id = self.complete(api)
        rows = client.get(f"/runs/{run_id}/results",
                          params={"view": "all"}).json()["results"]
        resp = client.post(f"/runs/{run_id}/labels", json={
            "item_id": rows[0]["item_id"], "label": "irrelevant",
            "labeler": "reviewer-1",
        })
        assert resp.status_code == 201
        assert resp.json()["label"] == "irrelevant"
        missing = client.post(f"/runs/{run_id}/labels", json={
            "item_id": "websearch:ffffffffffff", "label": "relevant",
        })
        assert missing.status_code == 404

    def test_export_formats(self, api):
        client, run_id = self.complete(api)
        jsonl = client.get(f"/runs/{run_id}/export")
        assert jsonl.status_code == 200
        assert jsonl.headers["content-type"].startswith("application/x-ndjson")
        types = [json.loads(line)["type"] for line in jsonl.text.splitlines()]
        assert types[0] == "run"
        csv_resp = client.get(f"/runs/{run_id}/export",
                              params={"format": "csv"})
        assert csv_resp.headers["content-type"].startswith("text/csv")
        assert csv_resp.text.splitlines()[0].startswith("rank,score")
        assert client.get(f"/runs/{run_id}/export",
                          params={"format": "xml"}).status_code == 400
