"""Source tags, canonical ordering, and per-source vocabularies.

Everything that depends on "which platform is this" lives here so the
planner, connectors, and feature builder agree on one set of names.
"""

GITHUB_REPOS = "github_repos"
GITHUB_ISSUES = "github_issues"
STACKOVERFLOW = "stackoverflow"
WEBSEARCH = "websearch"

# Canonical order, used everywhere ordering matters (query distribution,
# report layout). Fixed for determinism.
SOURCE_ORDER = (GITHUB_REPOS, GITHUB_ISSUES, STACKOVERFLOW, WEBSEARCH)
SOURCES = frozenset(SOURCE_ORDER)

# Qualifier keys accepted per source.
QUALIFIER_VOCAB = {
    GITHUB_REPOS: frozenset({"language", "created", "kind"}),
    GITHUB_ISSUES: frozenset({"language", "created", "kind"}),
    STACKOVERFLOW: frozenset({"tags", "accepted_answer", "min_score"}),
    WEBSEARCH: frozenset({"site", "filetype"}),
}

# Field selectors a query may target per source.
FIELD_TARGETS = {
    GITHUB_REPOS: frozenset({"description", "readme", "title_body"}),
    GITHUB_ISSUES: frozenset({"description", "readme", "title_body", "issue"}),
    STACKOVERFLOW: frozenset({"title", "body"}),
    WEBSEARCH: frozenset(),
}

# Per-source extras vocabulary for retrieved items.
EXTRAS_VOCAB = {
    GITHUB_REPOS: frozenset({"readme_text", "description", "stars"}),
    GITHUB_ISSUES: frozenset({"issue_body", "state", "labels"}),
    STACKOVERFLOW: frozenset({"question_body", "tags", "score", "has_accepted_answer"}),
    WEBSEARCH: frozenset({"meta_description"}),
}

# Canonical list (and order) of textual fields embedded per source. Fixed
# order keeps feature vectors well-defined; missing fields become zero blocks.
EMBED_FIELDS = {
    GITHUB_REPOS: ("title", "snippet", "description", "readme_text"),
    GITHUB_ISSUES: ("title", "snippet", "issue_body"),
    STACKOVERFLOW: ("title", "snippet", "question_body"),
    WEBSEARCH: ("title", "snippet", "meta_description"),
}

VALID_EMBEDDING_DIMS = (512, 1024, 1536)


def ordered(sources):
    """Return the given sources in canonical order."""
    return [s for s in SOURCE_ORDER if s in sources]
