"""Labeled-dataset loading, validation, and manifest checking."""

from __future__ import annotations

import datetime as dt
import json
import os
from dataclasses import dataclass
from typing import Optional

from greylit import sources
from greylit.connectors.dedup import deduplicate
from greylit.connectors.items import RetrievedItem, item_id_for
from greylit.errors import ManifestError, ParseError
from greylit.models.base import IRRELEVANT, RELEVANT
from greylit.planner.types import SearchIntent

DATASET_SCHEMA_VERSION = 1

_EPOCH = dt.datetime(1970, 1, 1, tzinfo=dt.timezone.utc)


@dataclass(frozen=True)
class LabeledRecord:
    item: RetrievedItem
    intent: SearchIntent
    label: str


@dataclass
class LabeledDataset:
    source: str
    records: list
    manifest: Optional[dict] = None

    def __len__(self):
        return len(self.records)

    def labels(self):
        return [r.label for r in self.records]


def _parse_record(raw, index, expected_source=None):
    path = f"record[{index}]"
    if not isinstance(raw, dict):
        raise ParseError(path, "must be an object")
    for key in ("source", "intent", "item", "label"):
        if key not in raw:
            raise ParseError(f"{path}.{key}", "missing required field")
    source = raw["source"]
    if source not in sources.SOURCES:
        raise ParseError(f"{path}.source", f"unknown source {source!r}")
    if expected_source and source != expected_source:
        raise ParseError(f"{path}.source",
                         f"expected {expected_source}, got {source}")
    label = raw["label"]
    if label not in (RELEVANT, IRRELEVANT):
        raise ParseError(f"{path}.label", f"unknown label {label!r}")
    intent_raw = raw["intent"]
    if not isinstance(intent_raw, dict) or "id" not in intent_raw \
            or "prompt" not in intent_raw:
        raise ParseError(f"{path}.intent", "must carry id and prompt")
    created = intent_raw.get("created_at")
    intent = SearchIntent(
        id=str(intent_raw["id"]),
        prompt=intent_raw["prompt"],
        created_at=dt.datetime.fromisoformat(created) if created else _EPOCH,
    )
    item_raw = raw["item"]
    if not isinstance(item_raw, dict):
        raise ParseError(f"{path}.item", "must be an object")
    for key in ("url", "title"):
        if key not in item_raw:
            raise ParseError(f"{path}.item.{key}", "missing required field")
    try:
        item = RetrievedItem(
            item_id=item_raw.get("item_id") or item_id_for(source, item_raw["url"]),
            source=source,
            url=item_raw["url"],
            title=item_raw["title"],
            snippet=item_raw.get("snippet", ""),
            extras=item_raw.get("extras", {}),
        )
    except Exception as exc:
        raise ParseError(f"{path}.item", str(exc)) from exc
    return LabeledRecord(item=item, intent=intent, label=label)


def record_to_dict(record: LabeledRecord) -> dict:
    return {
        "source": record.item.source,
        "intent": {"id": record.intent.id, "prompt": record.intent.prompt},
        "item": {
            "item_id": record.item.item_id,
            "url": record.item.url,
            "title": record.item.title,
            "snippet": record.item.snippet,
            "extras": record.item.extras,
        },
        "label": record.label,
    }


def _dedup_records(records):
    """Near-duplicate removal per originating intent, preserving order."""
    by_intent = {}
    for i, rec in enumerate(records):
        by_intent.setdefault(rec.intent.id, []).append(i)
    keep = set()
    for indices in by_intent.values():
        group = [records[i].item for i in indices]
        survivors = {id(item) for item in deduplicate(group)}
        keep.update(i for i, item in zip(indices, group) if id(item) in survivors)
    return [rec for i, rec in enumerate(records) if i in keep]


def load_dataset(path, manifest=None, source=None) -> LabeledDataset:
    """Load a record-per-line dataset file; deduplicate; check the manifest.

    `manifest` may be a dict of expected counts (total/relevant/irrelevant)
    or omitted, in which case a sidecar `<path>.manifest.json` is used when
    present.
    """
    records = []
    with open(path, encoding="utf-8") as handle:
        for i, line in enumerate(handle):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"record[{i}]", f"invalid JSON: {exc}") from exc
            records.append(_parse_record(raw, i, expected_source=source))
    records = _dedup_records(records)
    if source is None and records:
        source = records[0].item.source

    if manifest is None:
        sidecar = f"{path}.manifest.json"
        if os.path.exists(sidecar):
            with open(sidecar, encoding="utf-8") as handle:
                manifest = json.load(handle)
    if manifest is not None:
        _check_manifest(records, manifest)
    return LabeledDataset(source=source, records=records, manifest=manifest)


def _check_manifest(records, manifest):
    actual = {
        "total": len(records),
        "relevant": sum(1 for r in records if r.label == RELEVANT),
        "irrelevant": sum(1 for r in records if r.label == IRRELEVANT),
    }
    expected = {k: manifest[k] for k in actual if k in manifest}
    mismatches = {k: (expected[k], actual[k]) for k in expected
                  if expected[k] != actual[k]}
    if mismatches:
        detail = ", ".join(
            f"{k}: expected {e}, got {a}" for k, (e, a) in mismatches.items()
        )
        raise ManifestError(f"manifest mismatch: {detail}",
                            expected=expected, actual=actual)
