"""HTTP request/response values and retrying fetch with exponential backoff."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from greylit.errors import RateLimitError, RequestFailedError, TransportError


@dataclass(frozen=True)
class Request:
    method: str
    url: str
    headers: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Response:
    status: int
    headers: dict = field(default_factory=dict)
    body: str = ""

    def header(self, name, default=None):
        for key, value in self.headers.items():
            if key.lower() == name.lower():
                return value
        return default


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    base_delay: float = 1.0  # seconds
    max_delay: float = 30.0
    jitter_fraction: float = 0.0

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if self.base_delay > self.max_delay:
            raise ValueError("base_delay must not exceed max_delay")
        if not 0.0 <= self.jitter_fraction <= 1.0:
            raise ValueError("jitter_fraction must be in [0, 1]")


@dataclass(frozen=True)
class FetchOutcome:
    response: Response
    attempt_count: int


def _is_rate_limited(response: Response) -> bool:
    if response.status == 429:
        return True
    if response.status == 403:
        return (
            response.header("Retry-After") is not None
            or response.header("X-RateLimit-Remaining") == "0"
        )
    return False


def _retry_after_hint(response: Response):
    raw = response.header("Retry-After")
    if raw is None:
        return None
    try:
        return float(raw)
    except ValueError:
        return None


def fetch_with_retry(transport, request: Request, policy: RetryPolicy,
                     sleep=None, rng=None) -> FetchOutcome:
    """Execute `request` via `transport`, retrying transient failures.

    Retries on transport errors, 5xx, 429, and 403 carrying rate-limit
    headers. The delay before retry k is min(max_delay, base_delay * 2^(k-1))
    scaled by a uniform jitter factor in [1-j, 1+j]; a Retry-After hint on
    the response takes precedence over the computed delay. `sleep` and `rng`
    are injectable for tests.
    """
    if sleep is None:
        import time

        sleep = time.sleep
    rng = rng or random.Random()

    last_response = None
    for attempt in range(1, policy.max_attempts + 1):
        try:
            response = transport(request)
        except TransportError:
            if attempt == policy.max_attempts:
                raise RequestFailedError(
                    f"transport failed after {attempt} attempts",
                    attempt_count=attempt,
                )
            sleep(_delay(policy, attempt, None, rng))
            continue

        if response.status < 400:
            return FetchOutcome(response=response, attempt_count=attempt)

        rate_limited = _is_rate_limited(response)
        retryable = rate_limited or response.status >= 500
        if not retryable:
            raise RequestFailedError(
                f"non-retryable status {response.status}",
                status=response.status,
                attempt_count=attempt,
            )
        last_response = response
        if attempt == policy.max_attempts:
            break
        sleep(_delay(policy, attempt, _retry_after_hint(response), rng))

    if _is_rate_limited(last_response):
        raise RateLimitError(
            f"rate limited after {policy.max_attempts} attempts",
            retry_after=_retry_after_hint(last_response),
            attempt_count=policy.max_attempts,
        )
    raise RequestFailedError(
        f"status {last_response.status} after {policy.max_attempts} attempts",
        status=last_response.status,
        attempt_count=policy.max_attempts,
    )


def _delay(policy, retry_index, retry_after, rng):
    if retry_after is not None:
        return retry_after
    computed = min(policy.max_delay, policy.base_delay * 2 ** (retry_index - 1))
    if policy.jitter_fraction:
        computed *= rng.uniform(
            1 - policy.jitter_fraction, 1 + policy.jitter_fraction
        )
    return computed
