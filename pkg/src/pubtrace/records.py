"""Canonical record types for preprints, publications and auxiliary inputs.

All parsers in :mod:`pubtrace.ingest` produce these types; everything
downstream (matching, dataset generation, reporting) consumes them.
Validation happens at construction time so that a record object is always
internally consistent.
"""

from __future__ import annotations

import datetime as _dt
import re
from dataclasses import dataclass, field
from enum import Enum


_CATEGORY_RE = re.compile(r"^[a-z-]+(\.[A-Z]{2})?$")


class Source(str, Enum):
    """Where a publication record came from.

    ``arxiv`` marks records synthesized from a preprint's own DOI or
    journal-reference metadata rather than harvested from an index.
    """

    crossref = "crossref"
    dblp = "dblp"
    fixture = "fixture"
    arxiv = "arxiv"


class VenueType(str, Enum):
    journal = "journal"
    conference = "conference"
    book_chapter = "book_chapter"
    other = "other"
    unknown = "unknown"


class CitationVariant(str, Enum):
    arxiv_version = "arxiv_version"
    published_version = "published_version"


@dataclass(frozen=True)
class PartialDate:
    """A calendar date with year, year-month, or full-day precision.

    Bibliographic sources frequently supply year-only dates; comparisons
    between dates of mixed precision happen at the coarser precision and
    come back indeterminate (``None``) when equal there.
    """

    year: int
    month: int | None = None
    day: int | None = None

    def __post_init__(self):
        if self.month is None and self.day is not None:
            raise ValueError("day requires month")
        if self.month is not None and not 1 <= self.month <= 12:
            raise ValueError(f"month out of range: {self.month}")
        if self.day is not None and not 1 <= self.day <= 31:
            raise ValueError(f"day out of range: {self.day}")

    @property
    def precision(self) -> str:
        if self.day is not None:
            return "day"
        if self.month is not None:
            return "month"
        return "year"

    @classmethod
    def parse(cls, text: str) -> "PartialDate":
        """Parse ``YYYY``, ``YYYY-MM`` or ``YYYY-MM-DD``."""
        parts = text.strip().split("-")
        if not 1 <= len(parts) <= 3 or not all(p.isdigit() for p in parts):
            raise ValueError(f"not a date: {text!r}")
        nums = [int(p) for p in parts]
        return cls(*nums)

    @classmethod
    def from_date(cls, d: _dt.date) -> "PartialDate":
        return cls(d.year, d.month, d.day)

    def isoformat(self) -> str:
        if self.day is not None:
            return f"{self.year:04d}-{self.month:02d}-{self.day:02d}"
        if self.month is not None:
            return f"{self.year:04d}-{self.month:02d}"
        return f"{self.year:04d}"

    def to_date(self) -> _dt.date:
        """Collapse to a :class:`datetime.date`, defaulting missing parts to 1."""
        return _dt.date(self.year, self.month or 1, self.day or 1)

    def sort_key(self) -> tuple[int, int, int]:
        return (self.year, self.month or 0, self.day or 0)


def compare_dates(a: PartialDate, b: PartialDate) -> int | None:
    """Compare two partial dates at their shared precision.

    Returns -1 if ``a`` is strictly before ``b``, +1 if strictly after, and
    ``None`` (indeterminate) when they are equal at the coarser of the two
    precisions.
    """
    for xa, xb in ((a.year, b.year), (a.month, b.month), (a.day, b.day)):
        if xa is None or xb is None:
            return None
        if xa != xb:
            return -1 if xa < xb else 1
    return None


def normalize_category(code: str) -> str:
    """Canonicalize an arXiv category code: ``CS.ai`` -> ``cs.AI``.

    Raises ``ValueError`` when the result does not match the accepted
    grammar (lowercase archive, optional two-letter uppercase subject).
    """
    code = code.strip()
    if "." in code:
        archive, _, subject = code.partition(".")
        code = f"{archive.lower()}.{subject.upper()}"
    else:
        code = code.lower()
    if not _CATEGORY_RE.match(code):
        raise ValueError(f"bad category code: {code!r}")
    return code


def _collapse_ws(text: str) -> str:
    return " ".join(text.split())


@dataclass(frozen=True)
class VersionEntry:
    """One submitted version of a preprint."""

    version_index: int
    title: str
    authors: tuple[str, ...]
    created: PartialDate
    parse_degraded: bool = False

    def __post_init__(self):
        if self.version_index < 1:
            raise ValueError("version_index must be >= 1")
        if not _collapse_ws(self.title):
            raise ValueError("title empty after whitespace collapse")
        if not self.authors and not self.parse_degraded:
            raise ValueError("empty author list requires parse_degraded flag")


@dataclass(frozen=True)
class PreprintRecord:
    """One arXiv-style submission with its full version history."""

    arxiv_id: str
    versions: tuple[VersionEntry, ...]
    categories: tuple[str, ...]
    abstract: str = ""
    doi: str | None = None
    journal_ref: str | None = None
    comments: str | None = None

    def __post_init__(self):
        if not self.arxiv_id:
            raise ValueError("arxiv_id required")
        if not self.versions:
            raise ValueError("versions must be non-empty")
        if self.versions[0].version_index != 1:
            raise ValueError("version history must start at index 1")
        indices = [v.version_index for v in self.versions]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError("version indices must be strictly increasing")
        if not self.categories:
            raise ValueError("categories must be non-empty")
        object.__setattr__(
            self, "categories", tuple(normalize_category(c) for c in self.categories)
        )

    @property
    def latest(self) -> VersionEntry:
        return self.versions[-1]

    @property
    def primary_category(self) -> str:
        return self.categories[0]

    @property
    def first_submitted(self) -> PartialDate:
        return self.versions[0].created


@dataclass(frozen=True)
class PublicationRecord:
    """One peer-reviewed bibliographic record.

    ``venue_type`` is ``unknown`` when the source supplied no information
    that classifies the venue; a free-text venue string alone (for example
    an arXiv journal reference) does not determine the type.
    """

    source: Source
    title: str
    authors: tuple[str, ...] = ()
    venue_name: str | None = None
    venue_type: VenueType = VenueType.unknown
    published_date: PartialDate | None = None
    doi: str | None = None

    def __post_init__(self):
        if not _collapse_ws(self.title):
            raise ValueError("publication title empty")


@dataclass(frozen=True)
class CodeLink:
    """A preprint-to-repository link (Papers-With-Code style)."""

    arxiv_id: str
    repo_url: str

    def __post_init__(self):
        if not self.arxiv_id or not self.repo_url:
            raise ValueError("arxiv_id and repo_url required")


@dataclass(frozen=True)
class CitationEntry:
    """Citation count for one version (arXiv or published) of one paper."""

    key: str
    citation_count: int
    variant: CitationVariant

    def __post_init__(self):
        if not self.key:
            raise ValueError("key required")
        if self.citation_count < 0:
            raise ValueError("citation_count must be >= 0")


@dataclass(frozen=True)
class ParsedArticle:
    """Structured full-text features extracted from one preprint's PDF.

    Word counts are ``None`` for sections the parser did not find; absent
    sections are never zero-filled so that medians can exclude them.
    """

    arxiv_id: str
    title_words: int | None = None
    abstract_words: int | None = None
    introduction_words: int | None = None
    conclusion_words: int | None = None
    acknowledgment_words: int | None = None
    num_figures: int = 0
    num_tables: int = 0
    references: tuple[tuple[str, int], ...] = field(default=())

    def __post_init__(self):
        for name in ("title_words", "abstract_words", "introduction_words",
                     "conclusion_words", "acknowledgment_words"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.num_figures < 0 or self.num_tables < 0:
            raise ValueError("figure/table counts must be >= 0")
        for _, count in self.references:
            if count < 0:
                raise ValueError("reference citation counts must be >= 0")
