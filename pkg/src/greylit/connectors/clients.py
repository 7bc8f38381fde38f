"""Source API clients and HTTP transports.

A client knows how to build a search request for one platform and how to
parse its paged payload into raw per-item objects. Transports execute
Request -> Response; the transcript transport replays recorded exchanges
deterministically for tests and offline runs.
"""

from __future__ import annotations

import json
from urllib.parse import quote, urlparse

from greylit import sources
from greylit.connectors.retry import Request, Response
from greylit.errors import PayloadError, TransportError
from greylit.planner.render import render_query


class RequestsTransport:
    """Live HTTP transport backed by the requests library."""

    def __init__(self, timeout: float = 30.0):
        self.timeout = timeout

    def __call__(self, request: Request) -> Response:
        import requests

        try:
            resp = requests.request(
                request.method,
                request.url,
                headers=request.headers,
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        return Response(
            status=resp.status_code, headers=dict(resp.headers), body=resp.text
        )


class TranscriptTransport:
    """Replays a recorded transcript: a list of request/response pairs.

    Entries are matched by (method, url); the first unconsumed match is
    served. Requests with no recorded exchange raise TransportError.
    """

    def __init__(self, entries):
        self.entries = list(entries)
        self.consumed = [False] * len(self.entries)
        self.requests_served = 0

    @classmethod
    def from_file(cls, path):
        with open(path, encoding="utf-8") as handle:
            return cls(json.load(handle))

    def __call__(self, request: Request) -> Response:
        for i, entry in enumerate(self.entries):
            if self.consumed[i]:
                continue
            rec = entry["request"]
            if rec["method"] == request.method and rec["url"] == request.url:
                self.consumed[i] = True
                self.requests_served += 1
                resp = entry["response"]
                return Response(
                    status=resp["status"],
                    headers=resp.get("headers", {}),
                    body=resp.get("body", ""),
                )
        raise TransportError(
            f"no recorded exchange for {request.method} {request.url}"
        )


def _parse_json_body(response):
    try:
        return json.loads(response.body)
    except json.JSONDecodeError as exc:
        raise PayloadError(f"response body is not valid JSON: {exc}") from exc


class GitHubSearchClient:
    """GitHub search API client for repositories or issues."""

    def __init__(self, token=None, base_url="https://api.github.com",
                 source=sources.GITHUB_REPOS):
        self.token = token
        self.base_url = base_url.rstrip("/")
        self.source = source
        path = "repositories" if source == sources.GITHUB_REPOS else "issues"
        self.endpoint_template = f"{self.base_url}/search/{path}?q={{query}}&page={{page}}&per_page={{per_page}}"

    def _headers(self):
        headers = {"Accept": "application/vnd.github+json"}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        return headers

    def search_request(self, q, page, per_page) -> Request:
        url = self.endpoint_template.format(
            query=quote(render_query(q)), page=page, per_page=per_page
        )
        return Request("GET", url, self._headers())

    def parse_payload(self, response, page=1, per_page=30):
        body = _parse_json_body(response)
        items = body.get("items")
        if not isinstance(items, list):
            raise PayloadError("payload missing 'items' list")
        total = body.get("total_count", len(items))
        return items, page * per_page < total

    def readme_request(self, item) -> Request:
        """Request for a repository's README; path derived from the item URL."""
        path = urlparse(item.url).path.strip("/")
        url = f"{self.base_url}/repos/{path}/readme"
        headers = self._headers()
        headers["Accept"] = "application/vnd.github.raw+json"
        return Request("GET", url, headers)


class StackOverflowClient:
    def __init__(self, key=None, base_url="https://api.stackexchange.com/2.3"):
        self.key = key
        self.base_url = base_url.rstrip("/")
        self.source = sources.STACKOVERFLOW
        self.endpoint_template = (
            f"{self.base_url}/search/excerpts?q={{query}}&site=stackoverflow"
            f"&page={{page}}&pagesize={{per_page}}"
        )

    def search_request(self, q, page, per_page) -> Request:
        url = self.endpoint_template.format(
            query=quote(render_query(q)), page=page, per_page=per_page
        )
        if self.key:
            url += f"&key={self.key}"
        return Request("GET", url, {})

    def parse_payload(self, response, page=1, per_page=30):
        body = _parse_json_body(response)
        items = body.get("items")
        if not isinstance(items, list):
            raise PayloadError("payload missing 'items' list")
        return items, bool(body.get("has_more"))


class WebSearchClient:
    """Minimal websearch contract: a paged JSON endpoint returning
    {"results": [{url, title, snippet, meta_description}], "has_more": bool}.
    Any conforming backend (or a transcript fixture) plugs in here."""

    def __init__(self, endpoint, api_key=None):
        self.source = sources.WEBSEARCH
        self.endpoint_template = (
            f"{endpoint.rstrip('/')}?q={{query}}&page={{page}}&per_page={{per_page}}"
        )
        self.api_key = api_key

    def search_request(self, q, page, per_page) -> Request:
        url = self.endpoint_template.format(
            query=quote(render_query(q)), page=page, per_page=per_page
        )
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        return Request("GET", url, headers)

    def parse_payload(self, response, page=1, per_page=30):
        body = _parse_json_body(response)
        results = body.get("results")
        if not isinstance(results, list):
            raise PayloadError("payload missing 'results' list")
        return results, bool(body.get("has_more"))


def client_for(source, *, github_token=None, stackoverflow_key=None,
               websearch_endpoint=None, websearch_key=None):
    """Build the default client for a source tag."""
    if source in (sources.GITHUB_REPOS, sources.GITHUB_ISSUES):
        return GitHubSearchClient(token=github_token, source=source)
    if source == sources.STACKOVERFLOW:
        return StackOverflowClient(key=stackoverflow_key)
    if source == sources.WEBSEARCH:
        if not websearch_endpoint:
            raise ValueError("websearch requires an endpoint")
        return WebSearchClient(websearch_endpoint, api_key=websearch_key)
    raise ValueError(f"unknown source {source!r}")
