from greylit.connectors.items import FetchProvenance, RetrievedItem, extract_item
from greylit.connectors.retry import (
    FetchOutcome,
    Request,
    Response,
    RetryPolicy,
    fetch_with_retry,
)
from greylit.connectors.dedup import deduplicate, normalize_url, shingle_similarity
from greylit.connectors.execute import execute_query, query_id

__all__ = [
    "FetchProvenance",
    "RetrievedItem",
    "extract_item",
    "FetchOutcome",
    "Request",
    "Response",
    "RetryPolicy",
    "fetch_with_retry",
    "deduplicate",
    "normalize_url",
    "shingle_similarity",
    "execute_query",
    "query_id",
]
