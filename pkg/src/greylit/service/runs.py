"""Run orchestration: prompt to planned queries to fetched, classified,
ranked, and persisted results."""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import os
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from greylit import sources as source_defs
from greylit.connectors.dedup import deduplicate
from greylit.connectors.execute import execute_query, fetch_readmes
from greylit.embeddings.features import FeatureSpec, build_features
from greylit.errors import (
    FormatError,
    GreylitError,
    NotFoundError,
)
from greylit.models.base import RELEVANT, predict, rank_items
from greylit.planner.io import export_queries, import_queries
from greylit.planner.plan import plan_queries
from greylit.planner.types import QueryBundle, SearchIntent, SearchOptions
from greylit.service.store import AppendOnlyStore
from greylit.training.dataset import LabeledRecord, record_to_dict
from greylit.training.study import _embed_record_fields

STATUS_ORDER = ("planning", "fetching", "classifying", "complete")
EXPORT_FORMATS = ("jsonl", "csv")


def _query_content_key(q):
    return (q.source, q.terms, q.field_targets,
            json.dumps(q.qualifiers, sort_keys=True))


def _mark_user_edits(old: QueryBundle, new: QueryBundle) -> QueryBundle:
    """Queries not present verbatim in the previous bundle were edited."""
    import dataclasses

    existing = {_query_content_key(q) for q in old.queries}
    queries = tuple(
        q if _query_content_key(q) in existing
        else dataclasses.replace(q, origin="user_edited")
        for q in new.queries
    )
    return dataclasses.replace(new, queries=queries)


@dataclass
class RunRecord:
    run_id: str
    intent: SearchIntent
    options: SearchOptions
    bundle: Optional[QueryBundle] = None
    status: str = "planning"
    stage_timestamps: dict = field(default_factory=dict)
    counts: dict = field(default_factory=lambda: {
        "fetched": 0, "after_dedup": 0, "predicted_relevant": 0,
    })
    source_errors: dict = field(default_factory=dict)
    failure: Optional[str] = None

    def to_dict(self):
        return {
            "run_id": self.run_id,
            "intent": {
                "id": self.intent.id,
                "prompt": self.intent.prompt,
                "created_at": self.intent.created_at.isoformat(),
            },
            "options": {
                "sources": sorted(self.options.sources),
                "query_count": self.options.query_count,
                "date_range": list(self.options.date_range)
                if self.options.date_range else None,
                "languages": sorted(self.options.languages),
                "llm_model_id": self.options.llm_model_id,
                "llm_temperature": self.options.llm_temperature,
                "embedding_model_id": self.options.embedding_model_id,
                "embedding_dims": self.options.embedding_dims,
            },
            "bundle": json.loads(export_queries(self.bundle))
            if self.bundle else None,
            "status": self.status,
            "stage_timestamps": dict(self.stage_timestamps),
            "counts": dict(self.counts),
            "source_errors": dict(self.source_errors),
            "failure": self.failure,
        }


class PipelineService:
    """Wires the planner, connectors, embeddings, and model registry into
    persisted runs. All persistence is append-only record-per-line files."""

    def __init__(self, data_dir, llm, clients, transport, embedder, registry,
                 clock=None, id_gen=None, page_limit=2, per_page=30):
        self.data_dir = data_dir
        self.llm = llm
        self.clients = clients
        self.transport = transport
        self.embedder = embedder
        self.registry = registry
        self.clock = clock or (lambda: dt.datetime.now(dt.timezone.utc))
        self.id_gen = id_gen or (lambda: uuid.uuid4().hex)
        self.page_limit = page_limit
        self.per_page = per_page

        os.makedirs(data_dir, exist_ok=True)
        self._runs_store = AppendOnlyStore(os.path.join(data_dir, "runs.jsonl"))
        self._items_store = AppendOnlyStore(os.path.join(data_dir, "items.jsonl"))
        self._labels_store = AppendOnlyStore(os.path.join(data_dir, "labels.jsonl"))
        self._lock = threading.Lock()
        self._live_runs = {}
        self._runs = {}
        self._items = {}  # run_id -> list of result dicts, rank order
        self._labels = {}  # run_id -> item_id -> list of label dicts
        self._reload()

    # ----- persistence -------------------------------------------------

    def _reload(self):
        for snapshot in self._runs_store.load():
            self._runs[snapshot["run_id"]] = snapshot
        for rec in self._items_store.load():
            self._items.setdefault(rec["run_id"], []).append(rec)
        for rec in self._labels_store.load():
            self._labels.setdefault(rec["run_id"], {}) \
                .setdefault(rec["item_id"], []).append(rec)

    def _persist_run(self, run: RunRecord):
        snapshot = run.to_dict()
        with self._lock:
            self._runs[run.run_id] = snapshot
        self._runs_store.append(snapshot)

    def _advance(self, run: RunRecord, status: str):
        if status != "failed":
            if STATUS_ORDER.index(status) < STATUS_ORDER.index(run.status):
                raise GreylitError(
                    f"illegal status transition {run.status} -> {status}"
                )
        run.status = status
        run.stage_timestamps[status] = self.clock().isoformat()
        self._persist_run(run)

    # ----- run lifecycle -----------------------------------------------

    def make_intent(self, prompt) -> SearchIntent:
        return SearchIntent(id=self.id_gen(), prompt=prompt,
                            created_at=self.clock())

    def create_run(self, intent: SearchIntent, options: SearchOptions) -> str:
        run = RunRecord(run_id=self.id_gen(), intent=intent, options=options)
        self._live_runs[run.run_id] = run
        self._advance(run, "planning")
        return run.run_id

    def _live(self, run_id) -> RunRecord:
        if run_id not in self._live_runs:
            raise NotFoundError(f"unknown run {run_id!r}")
        return self._live_runs[run_id]

    def get_run(self, run_id) -> dict:
        with self._lock:
            if run_id not in self._runs:
                raise NotFoundError(f"unknown run {run_id!r}")
            return dict(self._runs[run_id])

    def plan_run(self, run_id) -> QueryBundle:
        run = self._live(run_id)
        if run.bundle is None:
            run.bundle = plan_queries(run.intent, run.options, self.llm,
                                      now=self.clock())
            self._persist_run(run)
        return run.bundle

    def replace_bundle(self, run_id, bundle: QueryBundle):
        run = self._live(run_id)
        if run.status != "planning":
            raise GreylitError("queries can only be replaced before fetching")
        run.bundle = bundle
        self._persist_run(run)

    def run_pipeline(self, run_id) -> dict:
        """Execute the full prompt-to-corpus workflow for a planned run.

        One source failing is an annotation, not a run failure; a stage
        failing outright marks the run failed with the stage name."""
        run = self._live(run_id)
        try:
            self.plan_run(run_id)
        except GreylitError as exc:
            run.failure = f"planning: {exc}"
            self._advance(run, "failed")
            return self.get_run(run_id)

        self._advance(run, "fetching")
        by_source = {}
        for q in run.bundle.queries:
            by_source.setdefault(q.source, []).append(q)
        fetched, errors = self._fetch_all(by_source)
        run.source_errors = errors
        run.counts["fetched"] = sum(len(v) for v in fetched.values())

        all_items = []
        for source in source_defs.ordered(fetched):
            all_items.extend(fetched[source])
        survivors = deduplicate(all_items)
        survivors = self._fetch_surviving_readmes(survivors)
        run.counts["after_dedup"] = len(survivors)

        self._advance(run, "classifying")
        try:
            results = self._classify(run, survivors)
        except GreylitError as exc:
            run.failure = f"classifying: {exc}"
            self._advance(run, "failed")
            return self.get_run(run_id)
        run.counts["predicted_relevant"] = sum(
            1 for r in results if r["prediction"]["label"] == RELEVANT
        )
        for rec in results:
            self._items_store.append(rec)
        with self._lock:
            self._items[run.run_id] = results
        self._advance(run, "complete")
        return self.get_run(run_id)

    def _fetch_all(self, by_source):
        fetched, errors = {}, {}

        def fetch_source(source):
            client = self.clients.get(source)
            if client is None:
                raise NotFoundError(f"no client configured for {source}")
            items = []
            for q in by_source[source]:
                items.extend(execute_query(
                    client, self.transport, q,
                    page_limit=self.page_limit, per_page=self.per_page,
                    clock=self.clock, request_id_gen=self.id_gen,
                ))
            return items

        ordered = source_defs.ordered(by_source)
        with ThreadPoolExecutor(max_workers=max(1, len(ordered))) as pool:
            futures = {s: pool.submit(fetch_source, s) for s in ordered}
        for source in ordered:
            try:
                fetched[source] = futures[source].result()
            except Exception as exc:
                fetched[source] = []
                errors[source] = str(exc)
        return fetched, errors

    def _fetch_surviving_readmes(self, items):
        client = self.clients.get(source_defs.GITHUB_REPOS)
        if client is None or not hasattr(client, "readme_request"):
            return items
        return fetch_readmes(client, self.transport, items,
                             request_id_gen=self.id_gen)

    def _classify(self, run, items):
        results = []
        mode = run.options.embedding_model_id
        intent_embs = {}
        for source in source_defs.ordered({i.source for i in items}):
            model = self.registry.get(source, mode)
            dims = model.feature_contract.dims or run.options.embedding_dims
            spec = FeatureSpec(model.feature_contract.spec_kind or "all_distances")
            if dims not in intent_embs:
                intent_embs[dims] = self.embedder(run.intent.prompt, mode, dims)
            predictions = []
            source_items = [i for i in items if i.source == source]
            for item in source_items:
                record = LabeledRecord(item=item, intent=run.intent,
                                       label=RELEVANT)  # label unused here
                field_embs = _embed_record_fields(
                    self.embedder, record, mode, dims
                )
                features = build_features(intent_embs[dims], field_embs, spec)
                predictions.append((item.item_id, predict(model, features)))
            ranked = rank_items(predictions)
            by_id = {i.item_id: i for i in source_items}
            for rr in ranked:
                item = by_id[rr.item_id]
                results.append({
                    "run_id": run.run_id,
                    "item_id": item.item_id,
                    "source": item.source,
                    "url": item.url,
                    "title": item.title,
                    "snippet": item.snippet,
                    "extras": item.extras,
                    "provenance": {
                        "query_id": item.provenance.query_id,
                        "request_id": item.provenance.request_id,
                        "page_number": item.provenance.page_number,
                        "fetched_at": item.provenance.fetched_at.isoformat(),
                        "endpoint": item.provenance.endpoint,
                        "attempt_count": item.provenance.attempt_count,
                    } if item.provenance else None,
                    "prediction": {
                        "label": rr.prediction.label,
                        "probability": rr.prediction.probability,
                        "margin": rr.prediction.margin,
                    },
                    "rank": rr.rank,
                    "score": rr.score,
                })
        return results

    # ----- results, labels, export -------------------------------------

    def get_results(self, run_id, view="relevant_only", source=None,
                    offset=0, limit=50):
        run = self.get_run(run_id)
        if run["status"] != "complete":
            raise GreylitError(f"run {run_id} is not complete "
                               f"(status {run['status']})")
        with self._lock:
            rows = list(self._items.get(run_id, []))
        if source is not None:
            rows = [r for r in rows if r["source"] == source]
        if view == "relevant_only":
            rows = [r for r in rows if r["prediction"]["label"] == RELEVANT]
        elif view != "all":
            raise FormatError(f"unknown view {view!r}")
        return {
            "total": len(rows),
            "offset": offset,
            "limit": limit,
            "results": rows[offset:offset + limit],
        }

    def submit_label(self, run_id, item_id, label, labeler) -> dict:
        self.get_run(run_id)
        with self._lock:
            known = {r["item_id"] for r in self._items.get(run_id, [])}
        if item_id not in known:
            raise NotFoundError(f"item {item_id!r} does not belong to run")
        record = {
            "run_id": run_id,
            "item_id": item_id,
            "label": label,
            "labeled_at": self.clock().isoformat(),
            "labeler": labeler,
        }
        self._labels_store.append(record)
        with self._lock:
            self._labels.setdefault(run_id, {}).setdefault(item_id, []) \
                .append(record)
        return record

    def current_labels(self, run_id) -> dict:
        """Latest label per item; timestamp ties broken by insertion order."""
        with self._lock:
            history = self._labels.get(run_id, {})
            return {
                item_id: max(enumerate(recs),
                             key=lambda e: (e[1]["labeled_at"], e[0]))[1]
                for item_id, recs in history.items() if recs
            }

    def export_run(self, run_id, format="jsonl") -> str:
        if format not in EXPORT_FORMATS:
            raise FormatError(
                f"unsupported format {format!r}; supported: {EXPORT_FORMATS}"
            )
        run = self.get_run(run_id)
        with self._lock:
            rows = list(self._items.get(run_id, []))
        labels = self.current_labels(run_id)
        if format == "csv":
            return self._export_csv(rows, labels)
        return self._export_jsonl(run, rows, labels)

    def _export_jsonl(self, run, rows, labels):
        lines = [json.dumps({"type": "run", **run}, sort_keys=True)]
        if run["bundle"]:
            for q in run["bundle"]["queries"]:
                lines.append(json.dumps({"type": "query", **q}, sort_keys=True))
        for row in rows:
            lines.append(json.dumps({"type": "result", **row}, sort_keys=True))
        for item_id, label in sorted(labels.items()):
            lines.append(json.dumps({"type": "label", **label}, sort_keys=True))
            row = next(r for r in rows if r["item_id"] == item_id)
            dataset_record = record_to_dict(self._as_labeled_record(run, row,
                                                                    label))
            lines.append(json.dumps({"type": "dataset_record",
                                     **dataset_record}, sort_keys=True))
        return "\n".join(lines) + "\n"

    def _as_labeled_record(self, run, row, label):
        from greylit.connectors.items import RetrievedItem

        item = RetrievedItem(
            item_id=row["item_id"], source=row["source"], url=row["url"],
            title=row["title"], snippet=row["snippet"], extras=row["extras"],
        )
        intent = SearchIntent(
            id=run["intent"]["id"],
            prompt=run["intent"]["prompt"],
            created_at=dt.datetime.fromisoformat(run["intent"]["created_at"]),
        )
        return LabeledRecord(item=item, intent=intent, label=label["label"])

    def _export_csv(self, rows, labels):
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["rank", "score", "predicted", "label", "source",
                         "title", "url", "item_id"])
        for row in rows:
            label = labels.get(row["item_id"], {}).get("label", "")
            writer.writerow([
                row["rank"], row["score"], row["prediction"]["label"], label,
                row["source"], row["title"], row["url"], row["item_id"],
            ])
        return out.getvalue()

    def get_queries(self, run_id) -> dict:
        run = self._live(run_id)
        if run.bundle is None:
            raise NotFoundError("run has no planned queries yet")
        return json.loads(export_queries(run.bundle))

    def put_queries(self, run_id, document: dict) -> dict:
        bundle = import_queries(json.dumps(document))
        run = self._live(run_id)
        if run.bundle is not None:
            bundle = _mark_user_edits(run.bundle, bundle)
        self.replace_bundle(run_id, bundle)
        return json.loads(export_queries(bundle))
