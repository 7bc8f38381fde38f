"""Query planning: LLM-driven generation with a deterministic template fallback."""

from __future__ import annotations

import datetime as dt
import json
import re

from greylit import sources
from greylit.planner.io import query_from_dict
from greylit.planner.types import (
    GeneratorRecord,
    QueryBundle,
    SearchIntent,
    SearchOptions,
    StructuredQuery,
)
from greylit.planner.validate import validate_query

PROMPT_TEMPLATE_VERSION = "qplan-v1"

_PROMPT_TEMPLATE = """\
You are a search-query planner for grey-literature research in software
engineering. Given a research topic, produce platform-specific search
queries as strict JSON with no commentary.

Topic: {prompt}

Produce exactly these counts per source:
{allocation}

Constraints per source:
- github_repos / github_issues: field_targets from ["description", "readme",
  "title_body", "issue"]; qualifiers may use "language", "created"
  ([start, end] ISO dates), and "kind" ("repo" or "issue").
- stackoverflow: field_targets from ["title", "body"]; qualifiers may use
  "tags" (list), "accepted_answer" (bool), "min_score" (non-negative int).
- websearch: no field_targets; qualifiers may use "site" and "filetype".
  Include synonyms of the topic in the terms.
{extra_constraints}
Reply with a JSON object: {{"queries": [{{"source": ..., "terms": [...],
"field_targets": [...], "qualifiers": {{...}}}}, ...]}}
"""

# Fallback field-target variants cycled per source so multiple template
# queries for one source differ where the platform allows it.
_FALLBACK_TARGETS = {
    sources.GITHUB_REPOS: (("description",), ("readme",), ("title_body",)),
    sources.GITHUB_ISSUES: (("issue",), ("title_body",)),
    sources.STACKOVERFLOW: (("title", "body"),),
    sources.WEBSEARCH: ((),),
}


def allocate_counts(selected, total):
    """Distribute `total` queries over the selected sources, even split with
    the remainder going to earlier sources in canonical order."""
    order = sources.ordered(selected)
    base, remainder = divmod(total, len(order))
    return {s: base + (1 if i < remainder else 0) for i, s in enumerate(order)}


def plan_queries(
    intent: SearchIntent, options: SearchOptions, llm, now=None
) -> QueryBundle:
    """Turn an intent plus options into a bundle of platform queries.

    `llm` is any object with complete(prompt, model_id, temperature) -> str.
    LLM transport failures and unparseable output are not errors: the
    deterministic template fills whatever the LLM did not produce, and the
    failure is recorded in the generator record. `now` overrides the
    generated_at timestamp for reproducible runs.
    """
    allocation = allocate_counts(options.sources, options.query_count)
    failure = None
    accepted = {s: [] for s in allocation}
    try:
        raw = llm.complete(
            _build_prompt(intent, options, allocation),
            model_id=options.llm_model_id,
            temperature=options.llm_temperature,
        )
        salvaged, parse_note = _parse_llm_output(raw, allocation)
        failure = parse_note
        for q in salvaged:
            if len(accepted[q.source]) < allocation[q.source]:
                accepted[q.source].append(q)
    except Exception as exc:  # transport failure engages the fallback
        failure = f"llm call failed: {exc}"

    queries = []
    for source in sources.ordered(options.sources):
        got = accepted[source]
        queries.extend(got)
        for i in range(len(got), allocation[source]):
            queries.append(_fallback_query(intent, options, source, i))

    generator = GeneratorRecord(
        llm_model_id=options.llm_model_id,
        llm_temperature=options.llm_temperature,
        prompt_template_version=PROMPT_TEMPLATE_VERSION,
        generated_at=now or dt.datetime.now(dt.timezone.utc),
        llm_failure=failure,
    )
    return QueryBundle(intent_id=intent.id, queries=tuple(queries), generator=generator)


def _build_prompt(intent, options, allocation):
    lines = [f"- {s}: {n}" for s, n in allocation.items()]
    extra = []
    if options.date_range:
        start, end = options.date_range
        extra.append(
            f"Restrict creation dates to {_iso(start)}..{_iso(end)} where the "
            "platform supports it."
        )
    if options.languages:
        langs = ", ".join(sorted(options.languages))
        extra.append(f"Restrict to these programming languages: {langs}.")
    return _PROMPT_TEMPLATE.format(
        prompt=intent.prompt.strip(),
        allocation="\n".join(lines),
        extra_constraints=("".join(line + "\n" for line in extra)),
    )


def _parse_llm_output(raw, allocation):
    """Salvage well-formed queries from LLM output; return (queries, note)."""
    text = _strip_code_fence(raw)
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, TypeError):
        return [], "llm output was not parseable JSON"
    items = doc.get("queries") if isinstance(doc, dict) else None
    if not isinstance(items, list):
        return [], "llm output missing a 'queries' list"
    salvaged, dropped = [], 0
    for i, raw_q in enumerate(items):
        try:
            q = query_from_dict(raw_q, f"$.queries[{i}]")
        except Exception:
            dropped += 1
            continue
        q = StructuredQuery(
            source=q.source,
            terms=q.terms,
            field_targets=q.field_targets,
            qualifiers=q.qualifiers,
            origin="llm_generated",
        )
        if q.source not in allocation or validate_query(q):
            dropped += 1
            continue
        salvaged.append(q)
    note = f"llm output: {dropped} queries dropped as invalid" if dropped else None
    return salvaged, note


def _strip_code_fence(raw):
    text = (raw or "").strip()
    match = re.match(r"^```[a-zA-Z]*\n(.*)\n```$", text, re.DOTALL)
    return match.group(1) if match else text


def _fallback_query(intent, options, source, variant):
    """Deterministic template query: the literal intent phrase plus whatever
    qualifiers the options pin down. No synonym invention."""
    terms = [intent.prompt.strip()]
    qualifiers = {}
    if source in (sources.GITHUB_REPOS, sources.GITHUB_ISSUES):
        if options.languages:
            qualifiers["language"] = sorted(options.languages)[0]
        if options.date_range:
            start, end = options.date_range
            qualifiers["created"] = (_iso(start), _iso(end))
        if source == sources.GITHUB_ISSUES:
            qualifiers["kind"] = "issue"
    elif source == sources.STACKOVERFLOW:
        if options.languages:
            qualifiers["tags"] = [lang.lower() for lang in sorted(options.languages)]
    elif source == sources.WEBSEARCH:
        # Language restriction has no websearch operator; apply names as terms.
        terms.extend(sorted(options.languages))
    variants = _FALLBACK_TARGETS[source]
    return StructuredQuery(
        source=source,
        terms=tuple(terms),
        field_targets=variants[variant % len(variants)],
        qualifiers=qualifiers,
        origin="template_fallback",
    )


def _iso(value):
    return value if isinstance(value, str) else value.isoformat()
