"""Near-duplicate elimination over URLs, titles, and snippets."""

from __future__ import annotations

from urllib.parse import parse_qsl, urlencode, urlparse, urlunparse

from greylit.connectors.items import normalize_ws

DEFAULT_SHINGLE_SIZE = 3
DEFAULT_SIMILARITY_THRESHOLD = 0.9

_TRACKING_PREFIXES = ("utm_",)
_TRACKING_KEYS = {"gclid", "fbclid"}
_DEFAULT_PORTS = {"http": "80", "https": "443"}


def normalize_url(url: str) -> str:
    """Canonical URL form used for duplicate detection.

    Lowercases scheme and host, strips default ports, trailing slash, and
    fragment, drops tracking parameters, and sorts the remaining query
    parameters.
    """
    parsed = urlparse(url)
    scheme = parsed.scheme.lower()
    host = parsed.hostname.lower() if parsed.hostname else ""
    if parsed.port is not None and str(parsed.port) != _DEFAULT_PORTS.get(scheme):
        host = f"{host}:{parsed.port}"
    path = parsed.path.rstrip("/") if parsed.path not in ("", "/") else ""
    params = [
        (k, v)
        for k, v in parse_qsl(parsed.query, keep_blank_values=True)
        if k not in _TRACKING_KEYS
        and not any(k.startswith(p) for p in _TRACKING_PREFIXES)
    ]
    query = urlencode(sorted(params))
    return urlunparse((scheme, host, path, parsed.params, query, ""))


def _shingles(text: str, size: int = DEFAULT_SHINGLE_SIZE):
    tokens = normalize_ws(text.lower()).split()
    if not tokens:
        return set()
    if len(tokens) < size:
        return {tuple(tokens)}
    return {tuple(tokens[i : i + size]) for i in range(len(tokens) - size + 1)}


def shingle_similarity(text_a: str, text_b: str, size: int = DEFAULT_SHINGLE_SIZE) -> float:
    """Jaccard similarity of token shingles; 0.0 when either side is empty."""
    a, b = _shingles(text_a, size), _shingles(text_b, size)
    if not a or not b:
        return 0.0
    return len(a & b) / len(a | b)


def _item_text(item) -> str:
    return f"{item.title} {item.snippet}"


def deduplicate(items, threshold: float = DEFAULT_SIMILARITY_THRESHOLD):
    """Drop near-duplicates, keeping the earliest item of each class.

    Two items are near-duplicates when their normalized URLs are equal or
    the Jaccard similarity of 3-token shingles over title+snippet is at or
    above `threshold`. Applied across all sources within a run; output
    preserves input order of survivors, and the operation is idempotent.
    """
    survivors = []
    seen_urls = {}
    survivor_texts = []
    for item in items:
        norm = normalize_url(item.url)
        if norm in seen_urls:
            continue
        text = _item_text(item)
        if any(
            shingle_similarity(text, kept) >= threshold for kept in survivor_texts
        ):
            continue
        seen_urls[norm] = item
        survivor_texts.append(text)
        survivors.append(item)
    return survivors
