"""Structural validation of platform queries against per-source vocabularies."""

from __future__ import annotations

from greylit import sources
from greylit.planner.types import ORIGINS, StructuredQuery


def validate_query(q: StructuredQuery):
    """Return a list of violation messages; empty list means the query is ok.

    Violations are data, not failures: every problem is reported, none raised.
    """
    violations = []
    if q.source not in sources.SOURCES:
        violations.append(f"unknown source '{q.source}'")
        return violations  # remaining checks are source-relative

    if not any(t.strip() for t in q.terms):
        violations.append("terms must contain at least one non-empty phrase")

    allowed_targets = sources.FIELD_TARGETS[q.source]
    for target in q.field_targets:
        if target not in allowed_targets:
            violations.append(
                f"field target '{target}' not allowed for {q.source}"
            )

    vocab = sources.QUALIFIER_VOCAB[q.source]
    for key, value in q.qualifiers.items():
        if key not in vocab:
            violations.append(f"qualifier '{key}' not allowed for {q.source}")
            continue
        violations.extend(_check_qualifier(key, value))

    if q.origin not in ORIGINS:
        violations.append(f"unknown origin '{q.origin}'")
    return violations


def _check_qualifier(key, value):
    if key == "created":
        try:
            start, end = value
        except (TypeError, ValueError):
            return [f"qualifier 'created' must be a (start, end) pair, got {value!r}"]
        if str(start) > str(end):
            return [f"qualifier 'created' range is inverted: {start}..{end}"]
        return []
    if key == "min_score":
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            return [f"qualifier 'min_score' must be a non-negative integer, got {value!r}"]
        return []
    if key == "filetype":
        if not (isinstance(value, str) and value.isalnum()):
            return [f"qualifier 'filetype' must be alphanumeric, got {value!r}"]
        return []
    if key == "tags":
        if not isinstance(value, (list, tuple)) or not all(
            isinstance(t, str) and t for t in value
        ):
            return [f"qualifier 'tags' must be a list of non-empty strings, got {value!r}"]
        return []
    if key == "kind":
        if value not in ("repo", "issue"):
            return [f"qualifier 'kind' must be 'repo' or 'issue', got {value!r}"]
        return []
    if key == "accepted_answer":
        if not isinstance(value, bool):
            return [f"qualifier 'accepted_answer' must be a boolean, got {value!r}"]
        return []
    # language, site: any non-empty string
    if not (isinstance(value, str) and value.strip()):
        return [f"qualifier '{key}' must be a non-empty string, got {value!r}"]
    return []
