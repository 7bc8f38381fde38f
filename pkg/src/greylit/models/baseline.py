"""LLM relevance baseline: single-token binary prediction at temperature 0."""

from __future__ import annotations

import string

from greylit.errors import BaselineError, BaselineParseError
from greylit.models.base import IRRELEVANT, RELEVANT

BASELINE_PROMPT_VERSION = "rel-v1"

_PROMPT = """\
You judge whether a search result is relevant to a research topic.

Topic: {prompt}

Result:
  source: {source}
  title: {title}
  url: {url}
  snippet: {snippet}

Answer with exactly one word, yes or no: is this result relevant to the topic?
"""

_ANSWERS = {"yes": RELEVANT, "no": IRRELEVANT}


def llm_relevance_baseline(llm, intent, item, model_id="gpt-4o") -> str:
    """Ask the LLM for a yes/no relevance judgment; maps the first emitted
    token to a label. No fallback: this is an evaluation baseline."""
    prompt = _PROMPT.format(
        prompt=intent.prompt,
        source=item.source,
        title=item.title,
        url=item.url,
        snippet=item.snippet,
    )
    try:
        raw = llm.complete(prompt, model_id=model_id, temperature=0.0)
    except Exception as exc:
        raise BaselineError(f"llm call failed: {exc}") from exc
    tokens = (raw or "").strip().split()
    first = tokens[0].strip(string.punctuation).lower() if tokens else ""
    if first not in _ANSWERS:
        raise BaselineParseError(f"unmappable answer token {first!r}")
    return _ANSWERS[first]
