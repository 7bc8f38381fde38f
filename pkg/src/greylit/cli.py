"""Command-line interface."""

from __future__ import annotations

import datetime as dt
import json
import os
import sys
import uuid

import click

from greylit import sources as source_defs
from greylit.connectors.clients import (
    RequestsTransport,
    TranscriptTransport,
    client_for,
)
from greylit.connectors.dedup import deduplicate
from greylit.connectors.execute import execute_query
from greylit.embeddings.provider import (
    EmbeddingCache,
    HashEmbeddingProvider,
    OpenAIEmbeddingProvider,
    embed_text,
)
from greylit.llm import FailingLLM, OpenAIChatClient
from greylit.planner.io import export_queries, import_queries
from greylit.planner.plan import plan_queries
from greylit.planner.types import SearchIntent, SearchOptions
from greylit.service.registry import ModelRegistry
from greylit.service.runs import PipelineService
from greylit.study_metrics import load_study_records, summarize
from greylit.training.dataset import load_dataset
from greylit.training.study import run_study


@click.group()
def main():
    """Grey-literature retrieval and screening toolkit."""


def _parse_list(value):
    return [v.strip() for v in value.split(",") if v.strip()]


def _build_options(sources, count, date_from, date_to, llm, temp, languages,
                   embedding_model, dims):
    date_range = None
    if date_from or date_to:
        if not (date_from and date_to):
            raise click.UsageError("--from and --to must be given together")
        date_range = (dt.date.fromisoformat(date_from),
                      dt.date.fromisoformat(date_to))
    return SearchOptions(
        sources=frozenset(_parse_list(sources)),
        query_count=count,
        date_range=date_range,
        languages=frozenset(_parse_list(languages)) if languages else frozenset(),
        llm_model_id=llm,
        llm_temperature=temp,
        embedding_model_id=embedding_model,
        embedding_dims=dims,
    )


def _llm_client():
    if os.environ.get("GREYLIT_API_KEY"):
        return OpenAIChatClient()
    click.echo("note: GREYLIT_API_KEY unset; using the template fallback",
               err=True)
    return FailingLLM()


def _make_intent(prompt):
    return SearchIntent(id=uuid.uuid4().hex, prompt=prompt,
                        created_at=dt.datetime.now(dt.timezone.utc))


@main.command()
@click.option("--prompt", required=True, help="research topic text")
@click.option("--sources", default=",".join(source_defs.SOURCE_ORDER),
              show_default=True, help="comma-separated source tags")
@click.option("--from", "date_from", default=None, help="start date (ISO)")
@click.option("--to", "date_to", default=None, help="end date (ISO)")
@click.option("--count", default=4, show_default=True, help="total queries")
@click.option("--llm", default="gpt-4o", show_default=True)
@click.option("--temp", default=0.2, show_default=True)
@click.option("--languages", default=None)
@click.option("--out", type=click.Path(), default=None,
              help="write the query export document here (default stdout)")
def plan(prompt, sources, date_from, date_to, count, llm, temp, languages, out):
    """Generate platform queries for a prompt."""
    options = _build_options(sources, count, date_from, date_to, llm, temp,
                             languages, "text-embedding-3-small", 1536)
    bundle = plan_queries(_make_intent(prompt), options, _llm_client())
    document = export_queries(bundle)
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(document)
        click.echo(f"wrote {len(bundle.queries)} queries to {out}")
    else:
        click.echo(document, nl=False)


def _clients_for(sources_needed, websearch_required=True):
    clients = {}
    for source in sources_needed:
        if source == source_defs.WEBSEARCH:
            endpoint = os.environ.get("GREYLIT_WEBSEARCH_ENDPOINT")
            if not endpoint:
                if websearch_required:
                    raise click.UsageError(
                        "websearch requires GREYLIT_WEBSEARCH_ENDPOINT"
                    )
                continue
            clients[source] = client_for(
                source, websearch_endpoint=endpoint,
                websearch_key=os.environ.get("GREYLIT_WEBSEARCH_KEY"),
            )
        else:
            clients[source] = client_for(
                source,
                github_token=os.environ.get("GREYLIT_GITHUB_TOKEN"),
                stackoverflow_key=os.environ.get("GREYLIT_STACKEXCHANGE_KEY"),
            )
    return clients


@main.command()
@click.option("--queries", "queries_file", required=True,
              type=click.Path(exists=True), help="query export document")
@click.option("--pages", default=2, show_default=True)
@click.option("--per-page", default=30, show_default=True)
@click.option("--fixture", type=click.Path(exists=True), default=None,
              help="replay a recorded transcript instead of live HTTP")
@click.option("--out", type=click.Path(), default=None)
def fetch(queries_file, pages, per_page, fixture, out):
    """Execute planned queries against the source APIs."""
    with open(queries_file, encoding="utf-8") as handle:
        bundle = import_queries(handle.read())
    transport = (TranscriptTransport.from_file(fixture) if fixture
                 else RequestsTransport())
    clients = _clients_for({q.source for q in bundle.queries})
    items = []
    for q in bundle.queries:
        items.extend(execute_query(clients[q.source], transport, q,
                                   page_limit=pages, per_page=per_page))
    items = deduplicate(items)
    lines = [json.dumps({
        "item_id": i.item_id, "source": i.source, "url": i.url,
        "title": i.title, "snippet": i.snippet, "extras": i.extras,
    }, sort_keys=True) for i in items]
    payload = "\n".join(lines) + ("\n" if lines else "")
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(payload)
        click.echo(f"wrote {len(items)} items to {out}")
    else:
        click.echo(payload, nl=False)


def _embedder(offline, cache_path=None):
    provider = HashEmbeddingProvider() if offline else OpenAIEmbeddingProvider()
    cache = EmbeddingCache(cache_path) if cache_path else EmbeddingCache()

    def embed(text, model_id, dims):
        return embed_text(provider, text, model_id, dims, cache=cache)

    return embed


@main.command()
@click.option("--dataset", "dataset_dir", required=True,
              type=click.Path(exists=True),
              help="directory of <source>.jsonl files with manifest sidecars")
@click.option("--modes", default="text-embedding-3-small", show_default=True)
@click.option("--dims", default="512", show_default=True)
@click.option("--specs", default="all_distances,abs_diff", show_default=True)
@click.option("--models", default="gaussian_nb,logistic_regression,ridge,linear_svc",
              show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--offline", is_flag=True,
              help="use the deterministic offline embedding provider")
@click.option("--out", "out_dir", type=click.Path(), required=True)
def train(dataset_dir, modes, dims, specs, models, seed, offline, out_dir):
    """Run the model-selection protocol and save the selected models."""
    datasets = {}
    for name in sorted(os.listdir(dataset_dir)):
        if name.endswith(".jsonl"):
            source = name[: -len(".jsonl")]
            if source in source_defs.SOURCES:
                datasets[source] = load_dataset(
                    os.path.join(dataset_dir, name), source=source
                )
    if not datasets:
        raise click.UsageError(f"no <source>.jsonl files in {dataset_dir}")
    result = run_study(
        datasets,
        _embedder(offline),
        modes=_parse_list(modes),
        dims_list=[int(d) for d in _parse_list(dims)],
        specs=_parse_list(specs),
        kinds=_parse_list(models),
        seed=seed,
    )
    os.makedirs(out_dir, exist_ok=True)
    report_path = os.path.join(out_dir, "report.csv")
    with open(report_path, "w", encoding="utf-8") as handle:
        handle.write("source,embedding_model_id,dims,spec,kind,"
                     "balanced_accuracy,precision,recall,f1\n")
        for report in result.matrix:
            c, m = report.config, report.metrics
            handle.write(
                f"{c['source']},{c['embedding_model_id']},{c['dims']},"
                f"{c['spec']},{c['kind']},{m.balanced_accuracy:.4f},"
                f"{m.precision:.4f},{m.recall:.4f},{m.f1:.4f}\n"
            )
    from greylit.embeddings.features import FeatureSpec
    from greylit.training.gridsearch import fit_model
    from greylit.training.split import split_dataset
    from greylit.training.study import _feature_matrix

    registry = ModelRegistry()
    embedder = _embedder(offline)
    for (source, mode), report in result.selections.items():
        cfg = report.config
        train_ds, _ = split_dataset(datasets[source], seed)
        X = _feature_matrix(train_ds.records, embedder, mode, cfg["dims"],
                            FeatureSpec(cfg["spec"]))
        model = fit_model(cfg["kind"], X, train_ds.labels(),
                          cfg["hyperparams"], source=source)
        registry.register(source, mode, model)
    registry.save_to_directory(os.path.join(out_dir, "models"))
    click.echo(f"wrote {report_path} and "
               f"{len(result.selections)} selected models")


@main.command()
@click.option("--prompt", required=True)
@click.option("--sources", default=",".join(source_defs.SOURCE_ORDER),
              show_default=True)
@click.option("--from", "date_from", default=None)
@click.option("--to", "date_to", default=None)
@click.option("--count", default=4, show_default=True)
@click.option("--llm", default="gpt-4o", show_default=True)
@click.option("--temp", default=0.2, show_default=True)
@click.option("--languages", default=None)
@click.option("--embedding-model", default="text-embedding-3-small",
              show_default=True)
@click.option("--dims", default=1536, show_default=True)
@click.option("--models", "models_dir", required=True,
              type=click.Path(exists=True), help="serialized model registry")
@click.option("--data-dir", default="greylit-data", show_default=True)
@click.option("--fixture", type=click.Path(exists=True), default=None)
@click.option("--pages", default=2, show_default=True)
@click.option("--offline", is_flag=True)
@click.option("--serve-port", default=None, type=int,
              help="serve the HTTP API after the run completes")
def run(prompt, sources, date_from, date_to, count, llm, temp, languages,
        embedding_model, dims, models_dir, data_dir, fixture, pages, offline,
        serve_port):
    """Full prompt-to-corpus run, optionally serving the API afterwards."""
    options = _build_options(sources, count, date_from, date_to, llm, temp,
                             languages, embedding_model, dims)
    transport = (TranscriptTransport.from_file(fixture) if fixture
                 else RequestsTransport())
    service = PipelineService(
        data_dir=data_dir,
        llm=_llm_client(),
        clients=_clients_for(options.sources, websearch_required=False),
        transport=transport,
        embedder=_embedder(offline,
                           cache_path=os.path.join(data_dir, "embeddings.jsonl")),
        registry=ModelRegistry.from_directory(models_dir),
        page_limit=pages,
    )
    run_id = service.create_run(_make_intent(prompt), options)
    record = service.run_pipeline(run_id)
    click.echo(json.dumps(record, indent=2))
    if serve_port:
        import uvicorn

        from greylit.service.api import create_app

        uvicorn.run(create_app(service), host="127.0.0.1", port=serve_port)


@main.command()
@click.option("--run", "run_id", required=True)
@click.option("--format", "format_", default="jsonl", show_default=True)
@click.option("--data-dir", default="greylit-data", show_default=True)
@click.option("--models", "models_dir", default=None, type=click.Path())
@click.option("--out", type=click.Path(), default=None)
def export(run_id, format_, data_dir, models_dir, out):
    """Export a completed run (results + labels + provenance + queries)."""
    registry = (ModelRegistry.from_directory(models_dir) if models_dir
                else ModelRegistry())
    service = PipelineService(
        data_dir=data_dir, llm=FailingLLM(), clients={}, transport=None,
        embedder=None, registry=registry,
    )
    content = service.export_run(run_id, format=format_)
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(content)
        click.echo(f"wrote export to {out}")
    else:
        click.echo(content, nl=False)


@main.command("study-summarize")
@click.option("--in", "in_file", required=True, type=click.Path(exists=True))
def study_summarize(in_file):
    """Summarize paired usability-study measurements."""
    records = load_study_records(in_file)
    summary = summarize(records)
    click.echo(json.dumps(summary, indent=2))


@main.command()
@click.option("--data-dir", default="greylit-data", show_default=True)
@click.option("--models", "models_dir", required=True, type=click.Path(exists=True))
@click.option("--port", default=8000, show_default=True)
@click.option("--fixture", type=click.Path(exists=True), default=None)
@click.option("--offline", is_flag=True)
def serve(data_dir, models_dir, port, fixture, offline):
    """Serve the HTTP API."""
    import uvicorn

    from greylit.service.api import create_app

    transport = (TranscriptTransport.from_file(fixture) if fixture
                 else RequestsTransport())
    service = PipelineService(
        data_dir=data_dir,
        llm=_llm_client(),
        clients=_clients_for(source_defs.SOURCES, websearch_required=False),
        transport=transport,
        embedder=_embedder(offline,
                           cache_path=os.path.join(data_dir, "embeddings.jsonl")),
        registry=ModelRegistry.from_directory(models_dir),
    )
    uvicorn.run(create_app(service), host="127.0.0.1", port=port)


if __name__ == "__main__":
    sys.exit(main())
