import datetime as dt
import json
import os

import pytest
from click.testing import CliRunner

from greylit.cli import main
from greylit.connectors.clients import client_for
from greylit.llm import FailingLLM
from greylit.planner.plan import plan_queries
from greylit.planner.types import SearchIntent, SearchOptions
from greylit.training.dataset import record_to_dict

from service_env import REPO_ITEMS, SO_ITEMS, make_registry, prepared_run
from test_training import dataset

UTC = dt.timezone.utc


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(autouse=True)
def no_credentials(monkeypatch):
    for name in ("GREYLIT_API_KEY", "GREYLIT_GITHUB_TOKEN",
                 "GREYLIT_STACKEXCHANGE_KEY", "GREYLIT_WEBSEARCH_ENDPOINT",
                 "GREYLIT_WEBSEARCH_KEY"):
        monkeypatch.delenv(name, raising=False)


def plan_to_file(runner, path, sources="github_repos,stackoverflow", count=2):
    result = runner.invoke(main, [
        "plan", "--prompt", "flaky test detection",
        "--sources", sources, "--count", str(count), "--out", path,
    ])
    assert result.exit_code == 0, result.output
    return path


def write_fixture(queries_path, fixture_path, pages=2, per_page=30):
    """Record canned responses for every query in an exported bundle."""
    with open(queries_path, encoding="utf-8") as handle:
        doc = json.load(handle)
    from greylit.planner.io import import_queries

    bundle = import_queries(json.dumps(doc))
    entries = []
    for q in bundle.queries:
        client = client_for(q.source)
        if q.source == "github_repos":
            body = json.dumps({"total_count": len(REPO_ITEMS),
                               "items": REPO_ITEMS})
        else:
            body = json.dumps({"items": SO_ITEMS, "has_more": False})
        entries.append({
            "request": {"method": "GET",
                        "url": client.search_request(q, 1, per_page).url},
            "response": {"status": 200, "body": body},
        })
    gh = client_for("github_repos")
    from greylit.connectors.items import extract_item

    for payload in REPO_ITEMS:
        item = extract_item("github_repos", payload)
        entries.append({
            "request": {"method": "GET", "url": gh.readme_request(item).url},
            "response": {"status": 200,
                         "body": f"readme of {payload['full_name']}"},
        })
    with open(fixture_path, "w", encoding="utf-8") as handle:
        json.dump(entries, handle)
    return fixture_path


class TestPlan:
    def test_offline_fallback_plan(self, runner, tmp_path):
        out = str(tmp_path / "queries.json")
        plan_to_file(runner, out)
        doc = json.load(open(out))
        assert doc["schema_version"] == 1
        assert len(doc["queries"]) == 2
        assert {q["source"] for q in doc["queries"]} == \
            {"github_repos", "stackoverflow"}
        assert all(q["origin"] == "template_fallback"
                   for q in doc["queries"])

    def test_plan_to_stdout(self, runner):
        result = runner.invoke(main, [
            "plan", "--prompt", "flaky tests", "--sources", "websearch",
            "--count", "1",
        ])
        assert result.exit_code == 0
        doc = json.loads(result.output[result.output.index("{"):])
        assert doc["queries"][0]["terms"] == ["flaky tests"]

    def test_bad_source_rejected(self, runner):
        result = runner.invoke(main, [
            "plan", "--prompt", "x", "--sources", "usenet", "--count", "1",
        ])
        assert result.exit_code != 0


class TestFetch:
    def test_fixture_fetch(self, runner, tmp_path):
        queries = plan_to_file(runner, str(tmp_path / "q.json"))
        fixture = write_fixture(queries, str(tmp_path / "fixture.json"))
        out = str(tmp_path / "items.jsonl")
        result = runner.invoke(main, [
            "fetch", "--queries", queries, "--fixture", fixture,
            "--out", out,
        ])
        assert result.exit_code == 0, result.output
        items = [json.loads(line) for line in open(out)]
        assert len(items) == 4
        assert {i["source"] for i in items} == \
            {"github_repos", "stackoverflow"}

    def test_missing_queries_file(self, runner):
        result = runner.invoke(main, ["fetch", "--queries", "missing.json"])
        assert result.exit_code != 0


class TestTrain:
    def test_train_writes_report_and_models(self, runner, tmp_path):
        data_dir = tmp_path / "data"
        os.makedirs(data_dir)
        ds = dataset(24, 24, source="websearch")
        with open(data_dir / "websearch.jsonl", "w") as handle:
            for rec in ds.records:
                handle.write(json.dumps(record_to_dict(rec)) + "\n")
        out_dir = str(tmp_path / "out")
        result = runner.invoke(main, [
            "train", "--dataset", str(data_dir), "--modes", "hash-mode",
            "--dims", "512", "--specs", "cosine", "--models", "ridge",
            "--seed", "7", "--offline", "--out", out_dir,
        ])
        assert result.exit_code == 0, result.output
        report = open(os.path.join(out_dir, "report.csv")).read().splitlines()
        assert report[0].startswith("source,embedding_model_id")
        assert len(report) == 2  # header + 1 configuration
        models = os.listdir(os.path.join(out_dir, "models"))
        assert models == ["websearch__hash-mode.json"]

    def test_empty_dataset_dir_refused(self, runner, tmp_path):
        result = runner.invoke(main, [
            "train", "--dataset", str(tmp_path), "--out",
            str(tmp_path / "out"),
        ])
        assert result.exit_code != 0


class TestRunAndExport:
    def test_full_offline_run_and_export(self, runner, tmp_path):
        # models trained for the offline hash embedder
        models_dir = str(tmp_path / "models")
        registry = make_registry()
        # retag the registry for the embedding mode the CLI will use
        retagged = {("github_repos", "hash-mode"),
                    ("stackoverflow", "hash-mode")}
        for source, _ in retagged:
            registry.register(source, "hash-mode",
                              registry.get(source, "toy-embedding"))
        registry.save_to_directory(models_dir)

        intent = SearchIntent(id="x", prompt="flaky test detection",
                              created_at=dt.datetime(2025, 3, 1, tzinfo=UTC))
        options = SearchOptions(
            sources=frozenset({"github_repos", "stackoverflow"}),
            query_count=2,
        )
        bundle = plan_queries(intent, options, FailingLLM())
        queries_path = str(tmp_path / "q.json")
        from greylit.planner.io import export_queries

        with open(queries_path, "w") as handle:
            handle.write(export_queries(bundle))
        fixture = write_fixture(queries_path, str(tmp_path / "fixture.json"))

        data_dir = str(tmp_path / "run-data")
        result = runner.invoke(main, [
            "run", "--prompt", "flaky test detection",
            "--sources", "github_repos,stackoverflow", "--count", "2",
            "--embedding-model", "hash-mode", "--dims", "512",
            "--models", models_dir, "--data-dir", data_dir,
            "--fixture", fixture, "--offline",
        ])
        assert result.exit_code == 0, result.output
        record = json.loads(result.output[result.output.index("{"):])
        assert record["status"] == "complete"
        assert record["counts"]["fetched"] == 4

        export_result = runner.invoke(main, [
            "export", "--run", record["run_id"], "--data-dir", data_dir,
            "--format", "csv",
        ])
        assert export_result.exit_code == 0, export_result.output
        assert export_result.output.splitlines()[0].startswith("rank,score")

    def test_export_from_persisted_service_state(self, runner, tmp_path):
        service, run_id = prepared_run(tmp_path)
        service.run_pipeline(run_id)
        result = runner.invoke(main, [
            "export", "--run", run_id, "--data-dir", str(tmp_path),
        ])
        assert result.exit_code == 0, result.output
        first = json.loads(result.output.splitlines()[0])
        assert first["type"] == "run"
        assert first["status"] == "complete"

    def test_export_unknown_run_fails(self, runner, tmp_path):
        result = runner.invoke(main, [
            "export", "--run", "nope", "--data-dir", str(tmp_path),
        ])
        assert result.exit_code != 0


class TestStudySummarize:
    def test_summary_output(self, runner, tmp_path):
        path = tmp_path / "study.jsonl"
        rows = [
            {"participant_id": "p1", "condition": "manual",
             "ttfr_seconds": 120, "items_inspected_to_10": 40,
             "minutes_to_10": 30},
            {"participant_id": "p1", "condition": "tool",
             "ttfr_seconds": 30, "items_inspected_to_10": 15,
             "minutes_to_10": 10,
             "sus_responses": [4, 2, 4, 2, 4, 2, 4, 2, 4, 2]},
        ]
        with open(path, "w") as handle:
            for row in rows:
                handle.write(json.dumps(row) + "\n")
        result = runner.invoke(main, ["study-summarize", "--in", str(path)])
        assert result.exit_code == 0, result.output
        summary = json.loads(result.output)
        assert summary["tool"]["ttfr_seconds_mean"] == 30
        assert summary["sus"]["mean"] == 75.0
