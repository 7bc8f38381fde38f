"""Paged query execution with provenance and lazy README fetching."""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import uuid

from greylit import sources
from greylit.connectors.items import RetrievedItem, FetchProvenance, extract_item
from greylit.connectors.retry import RetryPolicy, fetch_with_retry
from greylit.errors import CredentialError, PayloadError, RequestFailedError
from greylit.planner.io import query_to_dict

DEFAULT_PAGE_LIMIT = 10


def query_id(q) -> str:
    """Stable identifier of a structured query (content hash)."""
    canon = json.dumps(query_to_dict(q), sort_keys=True)
    return "q" + hashlib.sha1(canon.encode("utf-8")).hexdigest()[:12]


def _default_request_id():
    return uuid.uuid4().hex


def execute_query(client, transport, q, page_limit=DEFAULT_PAGE_LIMIT,
                  per_page=30, policy=None, sleep=None, rng=None,
                  request_id_gen=None, clock=None):
    """Run a query through its source API, page by page.

    Returns items in source-reported order, pages concatenated, each carrying
    provenance with the originating query id, page number, and attempt count.
    `request_id_gen` and `clock` are injectable for deterministic tests.
    """
    policy = policy or RetryPolicy()
    request_id_gen = request_id_gen or _default_request_id
    clock = clock or (lambda: dt.datetime.now(dt.timezone.utc))
    qid = query_id(q)

    collected = []
    for page in range(1, page_limit + 1):
        request = client.search_request(q, page, per_page)
        request_id = request_id_gen()
        try:
            outcome = fetch_with_retry(transport, request, policy, sleep=sleep, rng=rng)
        except RequestFailedError as exc:
            if exc.status in (401, 403):
                raise CredentialError(
                    f"{client.source}: authentication failed ({exc.status})"
                ) from exc
            raise
        try:
            raw_items, has_more = client.parse_payload(
                outcome.response, page=page, per_page=per_page
            )
        except PayloadError as exc:
            raise PayloadError(str(exc), request_id=request_id) from exc
        provenance = FetchProvenance(
            query_id=qid,
            request_id=request_id,
            page_number=page,
            fetched_at=clock(),
            endpoint=client.endpoint_template,
            attempt_count=outcome.attempt_count,
        )
        for raw in raw_items:
            collected.append(extract_item(client.source, raw, provenance))
        if not has_more:
            break
    return collected


def fetch_readmes(client, transport, items, policy=None, sleep=None, rng=None,
                  request_id_gen=None):
    """Fill readme_text for surviving github_repos items, one extra request
    each. Called after deduplication to spare the rate limit; items that
    already carry a readme or whose fetch fails are left untouched."""
    policy = policy or RetryPolicy()
    out = []
    for item in items:
        if item.source != sources.GITHUB_REPOS or "readme_text" in item.extras:
            out.append(item)
            continue
        request = client.readme_request(item)
        try:
            outcome = fetch_with_retry(transport, request, policy, sleep=sleep, rng=rng)
        except RequestFailedError:
            out.append(item)
            continue
        extras = dict(item.extras)
        extras["readme_text"] = outcome.response.body
        out.append(RetrievedItem(
            item_id=item.item_id, source=item.source, url=item.url,
            title=item.title, snippet=item.snippet, extras=extras,
            provenance=item.provenance,
        ))
    return out
