"""Value types for query planning."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from typing import Any, Optional

from greylit import sources
from greylit.errors import InvalidIntentError, InvalidOptionsError

ORIGINS = ("llm_generated", "template_fallback", "user_edited", "imported")


def _date_string(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (dt.date, dt.datetime)):
        return value.isoformat()
    return value


@dataclass(frozen=True)
class SearchIntent:
    id: str
    prompt: str
    created_at: dt.datetime

    def __post_init__(self):
        if not self.prompt.strip():
            raise InvalidIntentError("intent prompt is empty")


@dataclass(frozen=True)
class SearchOptions:
    sources: frozenset
    query_count: int
    date_range: Optional[tuple] = None  # (start, end) dates
    languages: frozenset = frozenset()
    llm_model_id: str = "gpt-4o"
    llm_temperature: float = 0.0
    embedding_model_id: str = "text-embedding-3-small"
    embedding_dims: int = 1536

    def __post_init__(self):
        object.__setattr__(self, "sources", frozenset(self.sources))
        object.__setattr__(self, "languages", frozenset(self.languages))
        if not self.sources:
            raise InvalidOptionsError("at least one source is required")
        unknown = self.sources - sources.SOURCES
        if unknown:
            raise InvalidOptionsError(f"unknown sources: {sorted(unknown)}")
        if self.query_count < len(self.sources):
            raise InvalidOptionsError(
                f"query_count={self.query_count} is below the number of "
                f"selected sources ({len(self.sources)})"
            )
        if self.date_range is not None:
            start, end = self.date_range
            if start > end:
                raise InvalidOptionsError("date_range start is after end")
        if not 0.0 <= self.llm_temperature <= 2.0:
            raise InvalidOptionsError("llm_temperature must be in [0, 2]")
        if self.embedding_dims not in sources.VALID_EMBEDDING_DIMS:
            raise InvalidOptionsError(
                f"embedding_dims must be one of {sources.VALID_EMBEDDING_DIMS}"
            )


@dataclass(frozen=True)
class StructuredQuery:
    source: str
    terms: tuple
    field_targets: tuple = ()
    qualifiers: dict = field(default_factory=dict)
    origin: str = "llm_generated"

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "field_targets", tuple(self.field_targets))
        quals = dict(self.qualifiers)
        # Normalize container shapes so imported bundles compare equal to
        # originals: dates as ISO strings, ranges as pairs, tags as lists.
        if "created" in quals:
            try:
                start, end = quals["created"]
                quals["created"] = (_date_string(start), _date_string(end))
            except (TypeError, ValueError):
                pass  # left as-is; validate_query reports it
        if isinstance(quals.get("tags"), tuple):
            quals["tags"] = list(quals["tags"])
        object.__setattr__(self, "qualifiers", quals)


@dataclass(frozen=True)
class GeneratorRecord:
    llm_model_id: str
    llm_temperature: float
    prompt_template_version: str
    generated_at: dt.datetime
    llm_failure: Optional[str] = None  # transport/parse failure note, if any


@dataclass(frozen=True)
class QueryBundle:
    intent_id: str
    queries: tuple
    generator: GeneratorRecord

    def __post_init__(self):
        object.__setattr__(self, "queries", tuple(self.queries))
