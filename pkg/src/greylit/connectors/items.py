"""Retrieved items, fetch provenance, and per-source payload extraction."""

from __future__ import annotations

import datetime as dt
import hashlib
import re
from dataclasses import dataclass, field
from typing import Optional
from urllib.parse import urlparse

from greylit import sources
from greylit.errors import PayloadError

_WS = re.compile(r"\s+")


def normalize_ws(text: str) -> str:
    """Collapse internal whitespace runs and trim both ends."""
    return _WS.sub(" ", text).strip()


@dataclass(frozen=True)
class FetchProvenance:
    query_id: str
    request_id: str
    page_number: int
    fetched_at: dt.datetime
    endpoint: str
    attempt_count: int = 1

    def __post_init__(self):
        if self.attempt_count < 1:
            raise ValueError("attempt_count must be >= 1")


@dataclass(frozen=True)
class RetrievedItem:
    item_id: str
    source: str
    url: str
    title: str
    snippet: str = ""
    extras: dict = field(default_factory=dict)
    provenance: Optional[FetchProvenance] = None

    def __post_init__(self):
        parsed = urlparse(self.url)
        if not (parsed.scheme and parsed.netloc):
            raise PayloadError(f"url is not absolute: {self.url!r}")
        bad = set(self.extras) - sources.EXTRAS_VOCAB[self.source]
        if bad:
            raise PayloadError(
                f"extras keys {sorted(bad)} not in {self.source} vocabulary"
            )


def item_id_for(source: str, url: str) -> str:
    digest = hashlib.sha1(url.encode("utf-8")).hexdigest()[:12]
    return f"{source}:{digest}"


def extract_item(source, payload, provenance=None) -> RetrievedItem:
    """Map one platform per-item payload to a RetrievedItem.

    Missing optional fields become absent extras keys, never empty-string
    placeholders. Missing url or title is a payload error.
    """
    if not isinstance(payload, dict):
        raise PayloadError("item payload is not an object",
                           request_id=provenance.request_id if provenance else None)
    extractor = _EXTRACTORS[source]
    url, title, snippet, extras = extractor(payload)
    if not url or not isinstance(url, str):
        raise PayloadError("item payload has no url",
                           request_id=provenance.request_id if provenance else None)
    if not title or not isinstance(title, str):
        raise PayloadError("item payload has no title",
                           request_id=provenance.request_id if provenance else None)
    return RetrievedItem(
        item_id=item_id_for(source, url),
        source=source,
        url=url,
        title=normalize_ws(title),
        snippet=normalize_ws(snippet or ""),
        extras=extras,
        provenance=provenance,
    )


def _put(extras, key, value):
    if value is not None:
        extras[key] = value


def _extract_github_repo(p):
    extras = {}
    _put(extras, "description", p.get("description"))
    _put(extras, "readme_text", p.get("readme_text") or p.get("readme"))
    _put(extras, "stars", p.get("stargazers_count", p.get("stars")))
    url = p.get("html_url") or p.get("url")
    title = p.get("full_name") or p.get("name") or p.get("title")
    return url, title, p.get("description"), extras


def _extract_github_issue(p):
    extras = {}
    _put(extras, "issue_body", p.get("body"))
    _put(extras, "state", p.get("state"))
    labels = p.get("labels")
    if labels is not None:
        extras["labels"] = [
            lab["name"] if isinstance(lab, dict) else lab for lab in labels
        ]
    url = p.get("html_url") or p.get("url")
    body = p.get("body") or ""
    return url, p.get("title"), body[:300], extras


def _extract_stackoverflow(p):
    extras = {}
    _put(extras, "question_body", p.get("body"))
    _put(extras, "tags", p.get("tags"))
    _put(extras, "score", p.get("score"))
    if "accepted_answer_id" in p:
        extras["has_accepted_answer"] = True
    elif "is_answered" in p:
        extras["has_accepted_answer"] = bool(p["is_answered"])
    url = p.get("link") or p.get("url")
    snippet = p.get("excerpt") or (p.get("body") or "")[:300]
    return url, p.get("title"), snippet, extras


def _extract_websearch(p):
    extras = {}
    _put(extras, "meta_description", p.get("meta_description"))
    return p.get("url") or p.get("link"), p.get("title"), p.get("snippet"), extras


_EXTRACTORS = {
    sources.GITHUB_REPOS: _extract_github_repo,
    sources.GITHUB_ISSUES: _extract_github_issue,
    sources.STACKOVERFLOW: _extract_stackoverflow,
    sources.WEBSEARCH: _extract_websearch,
}
