from greylit.planner.types import (
    GeneratorRecord,
    QueryBundle,
    SearchIntent,
    SearchOptions,
    StructuredQuery,
)
from greylit.planner.validate import validate_query
from greylit.planner.render import render_query
from greylit.planner.plan import plan_queries, PROMPT_TEMPLATE_VERSION
from greylit.planner.io import export_queries, import_queries

__all__ = [
    "GeneratorRecord",
    "QueryBundle",
    "SearchIntent",
    "SearchOptions",
    "StructuredQuery",
    "validate_query",
    "render_query",
    "plan_queries",
    "PROMPT_TEMPLATE_VERSION",
    "export_queries",
    "import_queries",
]
