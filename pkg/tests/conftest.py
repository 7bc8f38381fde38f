import datetime as dt
import itertools

import pytest

from greylit.planner.types import SearchIntent, SearchOptions


@pytest.fixture
def intent():
    return SearchIntent(
        id="intent-1",
        prompt="flaky test detection in CI",
        created_at=dt.datetime(2025, 1, 15, 12, 0, tzinfo=dt.timezone.utc),
    )


@pytest.fixture
def options():
    return SearchOptions(
        sources=frozenset({"github_issues"}),
        query_count=2,
    )


@pytest.fixture
def fixed_clock():
    return lambda: dt.datetime(2025, 3, 1, 9, 0, tzinfo=dt.timezone.utc)


@pytest.fixture
def seq_ids():
    counter = itertools.count(1)
    return lambda: f"id-{next(counter):04d}"
