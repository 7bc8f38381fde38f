import json
import os

import pytest

from greylit.errors import (
    FormatError,
    GreylitError,
    NotFoundError,
    ParseError,
)
from greylit.models.base import IRRELEVANT, RELEVANT
from greylit.models.gaussian_nb import fit_gaussian_nb
from greylit.service.registry import ModelRegistry
from greylit.service.store import AppendOnlyStore

from service_env import build_service, prepared_run


class TestAppendOnlyStore:
    def test_round_trip_order_preserved(self, tmp_path):
        store = AppendOnlyStore(str(tmp_path / "s.jsonl"))
        for i in range(5):
            store.append({"i": i})
        assert store.load() == [{"i": i} for i in range(5)]

    def test_missing_file_is_empty(self, tmp_path):
        assert AppendOnlyStore(str(tmp_path / "none.jsonl")).load() == []

    def test_torn_trailing_record_discarded(self, tmp_path):
        path = str(tmp_path / "s.jsonl")
        store = AppendOnlyStore(path)
        store.append({"a": 1})
        store.append({"b": 2})
        with open(path, "a") as handle:
            handle.write('{"c": 3, "tr')  # crash mid-write
        assert AppendOnlyStore(path).load() == [{"a": 1}, {"b": 2}]

    def test_truncation_at_every_byte_keeps_whole_records(self, tmp_path):
        path = str(tmp_path / "s.jsonl")
        store = AppendOnlyStore(path)
        records = [{"n": i, "payload": "x" * i} for i in range(4)]
        for rec in records:
            store.append(rec)
        full = open(path, "rb").read()
        for cut in range(len(full) + 1):
            with open(path, "wb") as handle:
                handle.write(full[:cut])
            loaded = AppendOnlyStore(path).load()
            assert loaded == records[:len(loaded)]

    def test_mid_file_corruption_raises(self, tmp_path):
        path = str(tmp_path / "s.jsonl")
        with open(path, "w") as handle:
            handle.write('{"a": 1}\nnot json\n{"b": 2}\n')
        with pytest.raises(json.JSONDecodeError):
            AppendOnlyStore(path).load()


class TestRegistry:
    def test_directory_round_trip(self, tmp_path):
        registry = ModelRegistry()
        model = fit_gaussian_nb([[0.0], [1.0], [0.1], [0.9]],
                                [IRRELEVANT, RELEVANT, IRRELEVANT, RELEVANT],
                                source="websearch")
        registry.register("websearch", "text-embedding-3-small", model)
        registry.save_to_directory(str(tmp_path))
        loaded = ModelRegistry.from_directory(str(tmp_path))
        assert loaded.has("websearch", "text-embedding-3-small")
        back = loaded.get("websearch", "text-embedding-3-small")
        assert back.kind == "gaussian_nb"
        assert back.feature_contract == model.feature_contract

    def test_missing_model_is_not_found(self):
        with pytest.raises(NotFoundError):
            ModelRegistry().get("websearch", "nope")


class TestRunLifecycle:
    def test_full_pipeline(self, tmp_path):
        service, run_id = prepared_run(tmp_path)
        snapshot = service.run_pipeline(run_id)
        assert snapshot["status"] == "complete"
        assert snapshot["counts"] == {
            "fetched": 4, "after_dedup": 4, "predicted_relevant": 2,
        }
        assert snapshot["source_errors"] == {}
        assert list(snapshot["stage_timestamps"]) == [
            "planning", "fetching", "classifying", "complete",
        ]

    def test_results_views(self, tmp_path):
        service, run_id = prepared_run(tmp_path)
        service.run_pipeline(run_id)
        relevant = service.get_results(run_id, view="relevant_only")
        everything = service.get_results(run_id, view="all")
        assert relevant["total"] == 2
        assert everything["total"] == 4
        assert all(r["prediction"]["label"] == RELEVANT
                   for r in relevant["results"])
        with pytest.raises(FormatError):
            service.get_results(run_id, view="top")

    def test_source_filter_and_paging(self, tmp_path):
        service, run_id = prepared_run(tmp_path)
        service.run_pipeline(run_id)
        repos = service.get_results(run_id, view="all", source="github_repos")
        assert repos["total"] == 2
        assert all(r["source"] == "github_repos" for r in repos["results"])
        page = service.get_results(run_id, view="all", offset=1, limit=2)
        assert page["total"] == 4
        assert len(page["results"]) == 2

    def test_ranking_is_per_source_and_dense(self, tmp_path):
        service, run_id = prepared_run(tmp_path)
        service.run_pipeline(run_id)
        rows = service.get_results(run_id, view="all", limit=50)["results"]
        for source in ("github_repos", "stackoverflow"):
            ranks = sorted(r["rank"] for r in rows if r["source"] == source)
            assert ranks == [1, 2]

    def test_results_before_completion_refused(self, tmp_path):
        service, run_id = prepared_run(tmp_path)
        with pytest.raises(GreylitError):
            service.get_results(run_id)

    def test_unknown_run(self, tmp_path):
        service, _, _ = build_service(tmp_path)
        with pytest.raises(NotFoundError):
            service.get_run("missing")
        with pytest.raises(NotFoundError):
            service.run_pipeline("missing")

    def test_readmes_attached_to_survivors(self, tmp_path):
        service, run_id = prepared_run(tmp_path)
        service.run_pipeline(run_id)
        rows = service.get_results(run_id, view="all",
                                   source="github_repos")["results"]
        assert any(
            r["extras"].get("readme_text", "").startswith("readme of")
            for r in rows
        )

    def test_partial_source_failure_is_annotated_not_fatal(self, tmp_path):
        service, run_id = prepared_run(tmp_path)
        transport = service.transport
        # drop the stackoverflow exchange so that source alone fails
        keep = [i for i, e in enumerate(transport.entries)
                if "stackexchange" not in e["request"]["url"]]
        transport.entries = [transport.entries[i] for i in keep]
        transport.consumed = [False] * len(transport.entries)
        snapshot = service.run_pipeline(run_id)
        assert snapshot["status"] == "complete"
        assert "stackoverflow" in snapshot["source_errors"]
        assert snapshot["counts"]["fetched"] == 2

    def test_missing_model_fails_classifying_stage(self, tmp_path):
        service, run_id = prepared_run(tmp_path)
        service.registry = ModelRegistry()
        snapshot = service.run_pipeline(run_id)
        assert snapshot["status"] == "failed"
        assert snapshot["failure"].startswith("classifying:")

    def test_status_never_regresses(self, tmp_path):
        service, run_id = prepared_run(tmp_path)
        service.run_pipeline(run_id)
        run = service._live(run_id)
        with pytest.raises(GreylitError):
            service._advance(run, "fetching")


class TestQueryEditing:
    def test_replace_queries_before_fetch(self, tmp_path):
        service, run_id = prepared_run(tmp_path)
        doc = service.get_queries(run_id)
        doc["queries"] = [q for q in doc["queries"]
                          if q["source"] == "github_repos"]
        doc["queries"][0]["terms"] = ["flaky tests quarantine"]
        service.put_queries(run_id, doc)
        stored = service.get_queries(run_id)
        assert len(stored["queries"]) == 1
        assert stored["queries"][0]["terms"] == ["flaky tests quarantine"]
        assert stored["queries"][0]["origin"] == "user_edited"

    def test_unchanged_queries_keep_their_origin(self, tmp_path):
        service, run_id = prepared_run(tmp_path)
        doc = service.get_queries(run_id)
        service.put_queries(run_id, doc)
        stored = service.get_queries(run_id)
        assert all(q["origin"] == "template_fallback"
                   for q in stored["queries"])

    def test_invalid_document_refused(self, tmp_path):
        service, run_id = prepared_run(tmp_path)
        doc = service.get_queries(run_id)
        doc["queries"][0].pop("source")
        with pytest.raises(ParseError):
            service.put_queries(run_id, doc)

    def test_editing_after_fetch_refused(self, tmp_path):
        service, run_id = prepared_run(tmp_path)
        doc = service.get_queries(run_id)
        service.run_pipeline(run_id)
        with pytest.raises(GreylitError):
            service.put_queries(run_id, doc)


class TestLabels:
    def finished(self, tmp_path):
        service, run_id = prepared_run(tmp_path)
        service.run_pipeline(run_id)
        rows = service.get_results(run_id, view="all")["results"]
        return service, run_id, rows

    def test_submit_and_read_back(self, tmp_path):
        service, run_id, rows = self.finished(tmp_path)
        item_id = rows[0]["item_id"]
        service.submit_label(run_id, item_id, RELEVANT, "reviewer-a")
        labels = service.current_labels(run_id)
        assert labels[item_id]["label"] == RELEVANT
        assert labels[item_id]["labeler"] == "reviewer-a"

    def test_later_label_supersedes(self, tmp_path):
        service, run_id, rows = self.finished(tmp_path)
        item_id = rows[0]["item_id"]
        service.submit_label(run_id, item_id, RELEVANT, "a")
        service.submit_label(run_id, item_id, IRRELEVANT, "b")
        assert service.current_labels(run_id)[item_id]["label"] == IRRELEVANT

    def test_foreign_item_refused(self, tmp_path):
        service, run_id, _ = self.finished(tmp_path)
        with pytest.raises(NotFoundError):
            service.submit_label(run_id, "websearch:deadbeef", RELEVANT, "a")

    def test_labels_survive_restart(self, tmp_path):
        service, run_id, rows = self.finished(tmp_path)
        item_id = rows[0]["item_id"]
        service.submit_label(run_id, item_id, IRRELEVANT, "a")
        reopened, _, _ = build_service(tmp_path)
        assert reopened.current_labels(run_id)[item_id]["label"] == IRRELEVANT
        assert reopened.get_run(run_id)["status"] == "complete"


class TestExport:
    def finished(self, tmp_path):
        service, run_id = prepared_run(tmp_path)
        service.run_pipeline(run_id)
        return service, run_id

    def test_jsonl_layers(self, tmp_path):
        service, run_id = self.finished(tmp_path)
        rows = service.get_results(run_id, view="all")["results"]
        service.submit_label(run_id, rows[0]["item_id"], RELEVANT, "a")
        lines = [json.loads(line)
                 for line in service.export_run(run_id).splitlines()]
        kinds = [line["type"] for line in lines]
        assert kinds.count("run") == 1
        assert kinds.count("query") == 2
        assert kinds.count("result") == 4
        assert kinds.count("label") == 1
        assert kinds.count("dataset_record") == 1
        dataset_line = next(l for l in lines if l["type"] == "dataset_record")
        assert dataset_line["label"] == RELEVANT
        assert dataset_line["intent"]["prompt"]

    def test_csv_shape(self, tmp_path):
        service, run_id = self.finished(tmp_path)
        csv_text = service.export_run(run_id, format="csv")
        lines = csv_text.splitlines()
        assert lines[0] == \
            "rank,score,predicted,label,source,title,url,item_id"
        assert len(lines) == 5

    def test_unsupported_format(self, tmp_path):
        service, run_id = self.finished(tmp_path)
        with pytest.raises(FormatError):
            service.export_run(run_id, format="xml")

    def test_export_is_byte_identical_across_reruns(self, tmp_path):
        outputs = []
        for name in ("a", "b", "c"):
            directory = tmp_path / name
            os.makedirs(directory)
            service, run_id = prepared_run(directory)
            service.run_pipeline(run_id)
            outputs.append((service.export_run(run_id, format="jsonl"),
                            service.export_run(run_id, format="csv")))
        assert outputs[0] == outputs[1] == outputs[2]
