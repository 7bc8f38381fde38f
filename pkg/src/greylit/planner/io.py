"""Export/import of query bundles as a versioned, human-editable document."""

from __future__ import annotations

import datetime as dt
import json

from greylit import sources
from greylit.errors import ParseError
from greylit.planner.types import (
    ORIGINS,
    GeneratorRecord,
    QueryBundle,
    StructuredQuery,
)

SCHEMA_VERSION = 1


def export_queries(bundle: QueryBundle) -> str:
    """Serialize a bundle to the versioned export document (JSON text)."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "intent_id": bundle.intent_id,
        "generator": {
            "llm_model_id": bundle.generator.llm_model_id,
            "llm_temperature": bundle.generator.llm_temperature,
            "prompt_template_version": bundle.generator.prompt_template_version,
            "generated_at": bundle.generator.generated_at.isoformat(),
            "llm_failure": bundle.generator.llm_failure,
        },
        "queries": [query_to_dict(q) for q in bundle.queries],
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def query_to_dict(q: StructuredQuery) -> dict:
    quals = dict(q.qualifiers)
    if "created" in quals and isinstance(quals["created"], tuple):
        quals["created"] = list(quals["created"])
    return {
        "source": q.source,
        "terms": list(q.terms),
        "field_targets": list(q.field_targets),
        "qualifiers": quals,
        "origin": q.origin,
    }


def query_from_dict(raw: dict, path: str) -> StructuredQuery:
    if not isinstance(raw, dict):
        raise ParseError(path, "query must be an object")
    for key in ("source", "terms"):
        if key not in raw:
            raise ParseError(f"{path}.{key}", "missing required field")
    if raw["source"] not in sources.SOURCES:
        raise ParseError(f"{path}.source", f"unknown source {raw['source']!r}")
    terms = raw["terms"]
    if not isinstance(terms, list) or not all(isinstance(t, str) for t in terms):
        raise ParseError(f"{path}.terms", "must be a list of strings")
    origin = raw.get("origin", "imported")
    if origin not in ORIGINS:
        raise ParseError(f"{path}.origin", f"unknown origin {origin!r}")
    qualifiers = raw.get("qualifiers", {})
    if not isinstance(qualifiers, dict):
        raise ParseError(f"{path}.qualifiers", "must be an object")
    field_targets = raw.get("field_targets", [])
    if not isinstance(field_targets, list):
        raise ParseError(f"{path}.field_targets", "must be a list")
    return StructuredQuery(
        source=raw["source"],
        terms=tuple(terms),
        field_targets=tuple(field_targets),
        qualifiers=qualifiers,
        origin=origin,
    )


def import_queries(document: str) -> QueryBundle:
    """Parse an export document back into a bundle.

    Round-trip identity with export_queries; schema violations raise
    ParseError naming the offending path.
    """
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ParseError("$", f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("$", "document must be an object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ParseError(
            "$.schema_version",
            f"expected {SCHEMA_VERSION}, got {doc.get('schema_version')!r}",
        )
    if "intent_id" not in doc:
        raise ParseError("$.intent_id", "missing required field")
    gen = doc.get("generator")
    if not isinstance(gen, dict):
        raise ParseError("$.generator", "missing or not an object")
    try:
        generated_at = dt.datetime.fromisoformat(gen["generated_at"])
    except KeyError:
        raise ParseError("$.generator.generated_at", "missing required field")
    except (TypeError, ValueError) as exc:
        raise ParseError("$.generator.generated_at", str(exc)) from exc
    try:
        generator = GeneratorRecord(
            llm_model_id=gen["llm_model_id"],
            llm_temperature=gen["llm_temperature"],
            prompt_template_version=gen["prompt_template_version"],
            generated_at=generated_at,
            llm_failure=gen.get("llm_failure"),
        )
    except KeyError as exc:
        raise ParseError(f"$.generator.{exc.args[0]}", "missing required field")
    raw_queries = doc.get("queries")
    if not isinstance(raw_queries, list):
        raise ParseError("$.queries", "missing or not a list")
    queries = tuple(
        query_from_dict(raw, f"$.queries[{i}]") for i, raw in enumerate(raw_queries)
    )
    return QueryBundle(
        intent_id=doc["intent_id"], queries=queries, generator=generator
    )
