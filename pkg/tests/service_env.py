"""A fully offline, deterministic pipeline environment for tests.

Planning runs on the template fallback (no LLM), fetching replays a
transcript synthesized from the planned queries, embeddings come from a
toy separable space, and a handcrafted linear model splits items whose
title mentions 'omega' from the rest.
"""

import datetime as dt
import itertools
import json

import numpy as np

from greylit.connectors.clients import (
    GitHubSearchClient,
    StackOverflowClient,
    TranscriptTransport,
)
from greylit.embeddings.vectors import EmbeddingVector
from greylit.llm import FailingLLM
from greylit.models.base import FeatureContract, TrainedClassifier
from greylit.planner.types import SearchOptions
from greylit.service.registry import ModelRegistry
from greylit.service.runs import PipelineService
from greylit.sources import EMBED_FIELDS

UTC = dt.timezone.utc
MODE = "toy-embedding"
DIMS = 512
PROMPT = "flaky test detection in continuous integration"


def toy_embedder(text, model_id, dims):
    """Texts mentioning 'omega' embed near -e1, everything else near +e1."""
    seed = int.from_bytes(text.encode("utf-8")[:6].ljust(6, b"\0"), "big")
    rng = np.random.default_rng(seed)
    base = np.zeros(dims)
    base[0] = -1.0 if "omega" in text else 1.0
    v = base + 0.01 * rng.standard_normal(dims)
    return EmbeddingVector(values=v / np.linalg.norm(v), normalized=True)


def toy_model(source):
    """Linear threshold on the title's cosine distance to the intent: items
    far from the intent direction are irrelevant."""
    n_fields = len(EMBED_FIELDS[source])
    weights = np.zeros(n_fields)
    weights[0] = -1.0  # title block
    return TrainedClassifier(
        kind="ridge",
        params={"weights": weights, "bias": 1.0},
        feature_contract=FeatureContract(
            spec_kind="cosine", dims=DIMS, field_count=n_fields,
            source=source, width=n_fields,
        ),
    )


def make_registry(sources=("github_repos", "stackoverflow")):
    registry = ModelRegistry()
    for source in sources:
        registry.register(source, MODE, toy_model(source))
    return registry


def fixed_clock():
    return dt.datetime(2025, 3, 1, 9, 0, tzinfo=UTC)


def seq_ids():
    counter = itertools.count(1)
    return lambda: f"id-{next(counter):04d}"


REPO_ITEMS = [
    {"html_url": "https://github.com/acme/flaky-radar",
     "full_name": "acme/flaky-radar",
     "description": "finds flaky tests in CI pipelines",
     "stargazers_count": 120},
    {"html_url": "https://github.com/acme/omega-archive",
     "full_name": "acme/omega-archive",
     "description": "omega project, unrelated archive",
     "stargazers_count": 3},
]

SO_ITEMS = [
    {"link": "https://stackoverflow.com/questions/101/detecting-flaky-tests",
     "title": "Detecting flaky tests in a CI pipeline",
     "score": 12},
    {"link": "https://stackoverflow.com/questions/202/omega-sorting",
     "title": "omega notation sorting question",
     "score": 1},
]


def transcript_for(service, run_id):
    """Record exchanges answering every page the planned queries will ask."""
    doc = service.get_queries(run_id)
    from greylit.planner.io import import_queries

    bundle = import_queries(json.dumps(doc))
    entries = []
    for q in bundle.queries:
        client = service.clients[q.source]
        if q.source == "github_repos":
            body = json.dumps({"total_count": len(REPO_ITEMS),
                               "items": REPO_ITEMS})
        elif q.source == "stackoverflow":
            body = json.dumps({"items": SO_ITEMS, "has_more": False})
        else:
            raise AssertionError(f"no canned payload for {q.source}")
        url = client.search_request(q, 1, service.per_page).url
        entries.append({"request": {"method": "GET", "url": url},
                        "response": {"status": 200, "body": body}})
    # README bodies for the repository results
    gh = service.clients.get("github_repos")
    if gh is not None:
        from greylit.connectors.items import extract_item

        for payload in REPO_ITEMS:
            item = extract_item("github_repos", payload)
            entries.append({
                "request": {"method": "GET",
                            "url": gh.readme_request(item).url},
                "response": {"status": 200,
                             "body": f"readme of {payload['full_name']}"},
            })
    return entries


def build_service(data_dir, sources=("github_repos", "stackoverflow")):
    options = SearchOptions(
        sources=frozenset(sources),
        query_count=len(sources),
        embedding_model_id=MODE,
        embedding_dims=DIMS,
    )
    clients = {}
    if "github_repos" in sources:
        clients["github_repos"] = GitHubSearchClient(source="github_repos")
    if "stackoverflow" in sources:
        clients["stackoverflow"] = StackOverflowClient()
    transport = TranscriptTransport([])
    service = PipelineService(
        data_dir=str(data_dir),
        llm=FailingLLM(),
        clients=clients,
        transport=transport,
        embedder=toy_embedder,
        registry=make_registry(sources),
        clock=fixed_clock,
        id_gen=seq_ids(),
        page_limit=2,
        per_page=30,
    )
    return service, options, transport


def prepared_run(data_dir, sources=("github_repos", "stackoverflow")):
    """A planned run with its transcript loaded, ready for run_pipeline."""
    service, options, transport = build_service(data_dir, sources)
    intent = service.make_intent(PROMPT)
    run_id = service.create_run(intent, options)
    service.plan_run(run_id)
    entries = transcript_for(service, run_id)
    transport.entries.extend(entries)
    transport.consumed.extend([False] * len(entries))
    return service, run_id
