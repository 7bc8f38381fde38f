"""Rendering of structured queries to each platform's native syntax."""

from __future__ import annotations

from greylit.errors import QueryValidationError
from greylit.planner.types import StructuredQuery
from greylit.planner.validate import validate_query
from greylit import sources

# GitHub `in:` clauses per field target. The `issue` target is expressed
# through the `is:issue` kind qualifier, not an `in:` clause.
_GITHUB_IN = {
    "description": "in:description",
    "readme": "in:readme",
    "title_body": "in:title,body",
}


def render_query(q: StructuredQuery) -> str:
    """Render a validated query to the platform's query string.

    Pure and deterministic: equal inputs give byte-equal output. Term order
    is preserved as given.
    """
    violations = validate_query(q)
    if violations:
        raise QueryValidationError(violations)
    if q.source in (sources.GITHUB_REPOS, sources.GITHUB_ISSUES):
        return _render_github(q)
    if q.source == sources.STACKOVERFLOW:
        return _render_stackoverflow(q)
    return _render_websearch(q)


def _date_str(value) -> str:
    return value if isinstance(value, str) else value.isoformat()


def _render_github(q) -> str:
    parts = list(q.terms)
    for target in q.field_targets:
        clause = _GITHUB_IN.get(target)
        if clause:
            parts.append(clause)
    quals = q.qualifiers
    if quals.get("kind") == "issue":
        parts.append("is:issue")
    if "language" in quals:
        parts.append(f"language:{quals['language']}")
    if "created" in quals:
        start, end = quals["created"]
        parts.append(f"created:{_date_str(start)}..{_date_str(end)}")
    return " ".join(parts)


def _render_stackoverflow(q) -> str:
    parts = list(q.terms)
    quals = q.qualifiers
    for tag in quals.get("tags", ()):
        parts.append(f"[{tag}]")
    if quals.get("accepted_answer"):
        parts.append("isaccepted:yes")
    if "min_score" in quals:
        parts.append(f"score:{quals['min_score']}..")
    return " ".join(parts)


def _render_websearch(q) -> str:
    parts = [f'"{term}"' for term in q.terms]
    quals = q.qualifiers
    if "site" in quals:
        parts.append(f"site:{quals['site']}")
    if "filetype" in quals:
        parts.append(f"filetype:{quals['filetype']}")
    return " ".join(parts)
