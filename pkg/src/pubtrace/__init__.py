"""pubtrace: link preprints to their peer-reviewed published versions.

The package covers the full study pipeline: ingesting preprint and
publication metadata, three-case matching (direct metadata, exact title,
semantic title-pair classification), title-pair dataset construction,
nonparametric statistics, and the published-vs-unpublished report tables.
"""

from .matcher import (
    EvalReport,
    Evidence,
    MatchCase,
    MatchResult,
    MatchStatus,
    baseline_fuzzy_match,
    build_title_index,
    classify_case1,
    classify_case2,
    classify_case3,
    evaluate,
    retrieve_candidates,
    run_pipeline,
)
from .normalize import (
    AuthorKey,
    NormalizedTitle,
    author_equal,
    author_overlap,
    first_author_match,
    normalize_title,
    parse_author,
)
from .records import (
    CitationEntry,
    CitationVariant,
    CodeLink,
    ParsedArticle,
    PartialDate,
    PreprintRecord,
    PublicationRecord,
    Source,
    VenueType,
    VersionEntry,
    compare_dates,
)
from .scorers import LexicalScorer, RemoteScorer
from .stats import (
    StatConfig,
    TestResult,
    dagostino_pearson,
    mann_whitney_u,
    median,
    proportion_table,
)

__version__ = "0.1.0"

__all__ = [
    "AuthorKey",
    "CitationEntry",
    "CitationVariant",
    "CodeLink",
    "EvalReport",
    "Evidence",
    "LexicalScorer",
    "MatchCase",
    "MatchResult",
    "MatchStatus",
    "NormalizedTitle",
    "ParsedArticle",
    "PartialDate",
    "PreprintRecord",
    "PublicationRecord",
    "RemoteScorer",
    "Source",
    "StatConfig",
    "TestResult",
    "VenueType",
    "VersionEntry",
    "author_equal",
    "author_overlap",
    "baseline_fuzzy_match",
    "build_title_index",
    "classify_case1",
    "classify_case2",
    "classify_case3",
    "compare_dates",
    "dagostino_pearson",
    "evaluate",
    "first_author_match",
    "mann_whitney_u",
    "median",
    "normalize_title",
    "parse_author",
    "proportion_table",
    "retrieve_candidates",
    "run_pipeline",
]
