"""HTTP API over the pipeline service.

Request and response bodies reuse the same document schemas as the file
formats; the UI and scripts consume only these endpoints.
"""

from __future__ import annotations

import datetime as dt
import threading

from fastapi import Body, FastAPI, Query
from fastapi.responses import JSONResponse, PlainTextResponse

from greylit.errors import (
    FormatError,
    GreylitError,
    InvalidIntentError,
    InvalidOptionsError,
    NotFoundError,
    ParseError,
)
from greylit.planner.types import SearchOptions


def parse_options(raw: dict) -> SearchOptions:
    date_range = None
    if raw.get("date_range"):
        start, end = raw["date_range"]
        date_range = (dt.date.fromisoformat(start), dt.date.fromisoformat(end))
    kwargs = {
        key: raw[key]
        for key in ("llm_model_id", "llm_temperature", "embedding_model_id",
                    "embedding_dims")
        if key in raw
    }
    return SearchOptions(
        sources=frozenset(raw.get("sources", [])),
        query_count=raw.get("query_count", 0),
        date_range=date_range,
        languages=frozenset(raw.get("languages", [])),
        **kwargs,
    )


def create_app(service, background=True) -> FastAPI:
    """Build the API application. With background=False the pipeline runs
    inline on POST /runs/{id}/start, which tests rely on for determinism."""
    app = FastAPI(title="grey-literature search service")

    @app.exception_handler(GreylitError)
    async def handle_error(request, exc):
        if isinstance(exc, NotFoundError):
            status = 404
        elif isinstance(exc, (InvalidIntentError, InvalidOptionsError,
                              ParseError, FormatError)):
            status = 400
        else:
            status = 409
        return JSONResponse(status_code=status,
                            content={"error": str(exc)})

    @app.post("/runs", status_code=201)
    def create_run(body: dict = Body(...)):
        prompt = (body.get("prompt") or "").strip()
        if not prompt:
            raise InvalidIntentError("prompt is required")
        options = parse_options(body.get("options", {}))
        intent = service.make_intent(prompt)
        run_id = service.create_run(intent, options)
        service.plan_run(run_id)
        return service.get_run(run_id)

    @app.get("/runs/{run_id}")
    def get_run(run_id: str):
        return service.get_run(run_id)

    @app.post("/runs/{run_id}/start", status_code=202)
    def start_run(run_id: str):
        service._live(run_id)  # 404 before spawning anything
        if background:
            thread = threading.Thread(
                target=service.run_pipeline, args=(run_id,), daemon=True
            )
            thread.start()
            return {"run_id": run_id, "started": True}
        service.run_pipeline(run_id)
        return service.get_run(run_id)

    @app.get("/runs/{run_id}/queries")
    def get_queries(run_id: str):
        return service.get_queries(run_id)

    @app.put("/runs/{run_id}/queries")
    def put_queries(run_id: str, body: dict = Body(...)):
        return service.put_queries(run_id, body)

    @app.get("/runs/{run_id}/results")
    def get_results(run_id: str, view: str = Query("relevant_only"),
                    source: str = Query(None), offset: int = Query(0),
                    limit: int = Query(50)):
        return service.get_results(run_id, view=view, source=source,
                                   offset=offset, limit=limit)

    @app.post("/runs/{run_id}/labels", status_code=201)
    def submit_label(run_id: str, body: dict = Body(...)):
        return service.submit_label(
            run_id, body.get("item_id"), body.get("label"),
            body.get("labeler", "anonymous"),
        )

    @app.get("/runs/{run_id}/export")
    def export_run(run_id: str, format: str = Query("jsonl")):
        content = service.export_run(run_id, format=format)
        media = "text/csv" if format == "csv" else "application/x-ndjson"
        return PlainTextResponse(content, media_type=media)

    return app
