"""Aggregate tables over match results, citations and parsed-article features.

Every public function returns one or more :class:`StudyTable` objects:
typed, deterministically ordered, machine-readable tables that
:func:`emit` writes as byte-stable CSV and JSON. Fractions are emitted
with four decimals.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .categories import CODE_INTENSIVE_CATEGORIES, category_name
from .matcher import MatchCase, MatchResult, MatchStatus
from .records import (
    CitationEntry,
    CodeLink,
    ParsedArticle,
    PreprintRecord,
    VenueType,
    compare_dates,
)
from .stats import StatConfig, mann_whitney_u, median

logger = logging.getLogger(__name__)

_KINDS = ("str", "int", "float", "fraction")

VENUE_ORDER = (
    VenueType.journal,
    VenueType.conference,
    VenueType.book_chapter,
    VenueType.unknown,
    VenueType.other,
)

VERSION_BUCKETS = ("1", "2", "3-5", ">5")


@dataclass
class StudyTable:
    """A named table with typed columns and stable row order."""

    name: str
    columns: list[tuple[str, str]]
    rows: list[tuple] = field(default_factory=list)
    provenance: str = ""
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        for col, kind in self.columns:
            if kind not in _KINDS:
                raise ValueError(f"unknown column kind {kind!r} for {col!r}")

    def add_row(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"expected {len(self.columns)} values, got {len(values)}")
        for value, (col, kind) in zip(values, self.columns):
            if kind == "str" and not isinstance(value, str):
                raise TypeError(f"column {col!r} expects str, got {type(value).__name__}")
            if kind == "int" and (isinstance(value, bool) or not isinstance(value, int)):
                raise TypeError(f"column {col!r} expects int, got {type(value).__name__}")
            if kind in ("float", "fraction") and not isinstance(value, (int, float)):
                raise TypeError(f"column {col!r} expects a number, got {type(value).__name__}")
        self.rows.append(tuple(values))

    def column(self, name: str) -> list:
        idx = [c for c, _ in self.columns].index(name)
        return [row[idx] for row in self.rows]


def _fraction(count: int, total: int) -> float:
    return count / total if total else 0.0


def _published(results: Iterable[MatchResult]) -> list[MatchResult]:
    return [r for r in results if r.status is not MatchStatus.unpublished]


def _venue_results(results: Iterable[MatchResult], venue: VenueType) -> list[MatchResult]:
    return [r for r in _published(results) if r.publication.venue_type is venue]


# ---------------------------------------------------------------------------
# Distribution tables
# ---------------------------------------------------------------------------

def published_type_distribution(results: Sequence[MatchResult]) -> StudyTable:
    """Counts and fractions of the four match outcomes."""
    table = StudyTable(
        name="published_type_distribution",
        columns=[("published_type", "str"), ("count", "int"), ("fraction", "fraction")],
        provenance="distribution of preprints by published type",
    )
    total = len(results)
    labels = {
        MatchCase.case1_direct: "case1_direct",
        MatchCase.case2_exact: "case2_exact",
        MatchCase.case3_semantic: "case3_semantic",
        MatchCase.none: "unpublished",
    }
    for case, label in labels.items():
        count = sum(1 for r in results if r.case is case)
        table.add_row(label, count, _fraction(count, total))
    return table


def yearly_counts_and_rate(
    results: Sequence[MatchResult], corpus: Sequence[PreprintRecord]
) -> StudyTable:
    """Per first-submission year: totals, published counts and publication rate.

    Years without submissions are omitted. ``meta['rate_monotone_decline']``
    flags a strictly declining rate across the reported years.
    """
    by_id = {r.arxiv_id: r for r in results}
    years: dict[int, dict[str, int]] = {}
    for preprint in corpus:
        result = by_id.get(preprint.arxiv_id)
        if result is None:
            continue
        year = preprint.first_submitted.year
        bucket = years.setdefault(year, {"total": 0, "published": 0})
        bucket["total"] += 1
        if result.status is not MatchStatus.unpublished:
            bucket["published"] += 1
    table = StudyTable(
        name="yearly_counts_and_rate",
        columns=[
            ("year", "int"),
            ("total", "int"),
            ("published", "int"),
            ("unpublished", "int"),
            ("publication_rate", "fraction"),
        ],
        provenance="preprint totals and publication rate by first-submission year",
    )
    rates = []
    for year in sorted(years):
        bucket = years[year]
        rate = _fraction(bucket["published"], bucket["total"])
        rates.append(rate)
        table.add_row(year, bucket["total"], bucket["published"],
                      bucket["total"] - bucket["published"], rate)
    table.meta["rate_monotone_decline"] = len(rates) >= 2 and all(
        b < a for a, b in zip(rates, rates[1:])
    )
    return table


def category_distribution(
    results: Sequence[MatchResult], corpus: Sequence[PreprintRecord]
) -> StudyTable:
    """Published vs unpublished counts grouped by first category label."""
    by_id = {r.arxiv_id: r for r in results}
    counts: dict[str, dict[str, int]] = {}
    unknown: dict[str, int] = {}
    for preprint in corpus:
        result = by_id.get(preprint.arxiv_id)
        if result is None:
            continue
        code = preprint.primary_category
        name = category_name(code)
        if name is None:
            unknown[code] = unknown.get(code, 0) + 1
            name = code
        bucket = counts.setdefault(code, {"published": 0, "unpublished": 0})
        key = "unpublished" if result.status is MatchStatus.unpublished else "published"
        bucket[key] += 1
    for code, n in unknown.items():
        logger.warning("unknown category code %s (%d records)", code, n)
    table = StudyTable(
        name="category_distribution",
        columns=[
            ("category", "str"),
            ("category_name", "str"),
            ("published", "int"),
            ("unpublished", "int"),
        ],
        provenance="published and unpublished preprints by first category label",
        meta={"unknown_categories": dict(sorted(unknown.items()))},
    )
    for code in sorted(counts):
        bucket = counts[code]
        table.add_row(code, category_name(code) or code, bucket["published"], bucket["unpublished"])
    return table


def venue_distribution(results: Sequence[MatchResult]) -> StudyTable:
    """Published preprints grouped by venue type."""
    published = _published(results)
    table = StudyTable(
        name="venue_distribution",
        columns=[("venue_type", "str"), ("count", "int"), ("fraction", "fraction")],
        provenance="distribution of published preprints by publication venue type",
    )
    for venue in VENUE_ORDER:
        count = sum(1 for r in published if r.publication.venue_type is venue)
        table.add_row(venue.value, count, _fraction(count, len(published)))
    return table


def submission_stage(
    results: Sequence[MatchResult], corpus: Sequence[PreprintRecord]
) -> StudyTable:
    """Whether the first arXiv version predates the formal publication date.

    Comparisons at mixed date precision are made at the coarser precision;
    equality there (or a missing publication date) lands in the
    indeterminate bucket. Reported for journal and conference papers.
    """
    by_id = {p.arxiv_id: p for p in corpus}
    table = StudyTable(
        name="submission_stage",
        columns=[
            ("venue_type", "str"),
            ("count", "int"),
            ("before_publication", "fraction"),
            ("after_publication", "fraction"),
            ("indeterminate", "fraction"),
        ],
        provenance="published preprints by submission stage relative to the publication date",
    )
    before_fracs = {}
    for venue in (VenueType.journal, VenueType.conference):
        group = _venue_results(results, venue)
        buckets = {"before": 0, "after": 0, "indeterminate": 0}
        for result in group:
            preprint = by_id.get(result.arxiv_id)
            pub_date = result.publication.published_date
            if preprint is None or pub_date is None:
                buckets["indeterminate"] += 1
                continue
            cmp = compare_dates(preprint.first_submitted, pub_date)
            if cmp is None:
                buckets["indeterminate"] += 1
            elif cmp < 0:
                buckets["before"] += 1
            else:
                buckets["after"] += 1
        n = len(group)
        before_fracs[venue.value] = _fraction(buckets["before"], n)
        table.add_row(
            venue.value,
            n,
            _fraction(buckets["before"], n),
            _fraction(buckets["after"], n),
            _fraction(buckets["indeterminate"], n),
        )
    table.meta["before_gap_journal_minus_conference"] = (
        before_fracs["journal"] - before_fracs["conference"]
    )
    return table


# ---------------------------------------------------------------------------
# Citation summary
# ---------------------------------------------------------------------------

def _citation_totals(
    results: Sequence[MatchResult], citations: Sequence[CitationEntry]
) -> tuple[dict[str, int], int]:
    """Total citations per paper, summing the arXiv and published variants.

    Entries join on arxiv_id or the matched publication's DOI; papers with
    no entry at all are counted as missing and excluded.
    """
    by_key: dict[str, list[CitationEntry]] = {}
    for entry in citations:
        by_key.setdefault(entry.key, []).append(entry)
    totals: dict[str, int] = {}
    missing = 0
    for result in results:
        keys = [result.arxiv_id]
        if result.publication is not None and result.publication.doi:
            keys.append(result.publication.doi)
        entries = [e for key in keys for e in by_key.get(key, ())]
        if not entries:
            missing += 1
            continue
        totals[result.arxiv_id] = sum(e.citation_count for e in entries)
    return totals, missing


def citation_summary(
    results: Sequence[MatchResult],
    citations: Sequence[CitationEntry],
    config: StatConfig = StatConfig(),
) -> StudyTable:
    """Median citations and zero-citation share per group, with rank tests.

    Groups: all published, journal papers, conference papers, unpublished.
    Mann-Whitney U compares each published group against the unpublished
    one at the configured significance level.
    """
    totals, missing = _citation_totals(results, citations)

    def values(group: Iterable[MatchResult]) -> list[int]:
        return [totals[r.arxiv_id] for r in group if r.arxiv_id in totals]

    groups = {
        "published": values(_published(results)),
        "journal": values(_venue_results(results, VenueType.journal)),
        "conference": values(_venue_results(results, VenueType.conference)),
        "unpublished": values(r for r in results if r.status is MatchStatus.unpublished),
    }
    table = StudyTable(
        name="citation_summary",
        columns=[
            ("group", "str"),
            ("count", "int"),
            ("median_citations", "float"),
            ("zero_citation_rate", "fraction"),
        ],
        provenance="citations of published and unpublished preprints (variants summed)",
        meta={"missing_citations": missing, "alpha": config.alpha},
    )
    for name, vals in groups.items():
        zero = sum(1 for v in vals if v == 0)
        table.add_row(
            name,
            len(vals),
            median(vals) if vals else 0.0,
            _fraction(zero, len(vals)),
        )
    tests = {}
    for name in ("published", "journal", "conference"):
        if groups[name] and groups["unpublished"]:
            result = mann_whitney_u(groups[name], groups["unpublished"])
            tests[f"{name}_vs_unpublished"] = {
                **result.to_dict(),
                "reject_h0": result.reject_h0_at(config.alpha),
            }
    table.meta["mann_whitney_u"] = tests
    return table


# ---------------------------------------------------------------------------
# Feature comparisons
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FeatureFilter:
    """Exclusions applied to the published side of feature comparisons.

    Changed-title matches and publications without a post-publication
    arXiv update may not reflect the final published content; book
    chapters and other venue types follow different writing conventions.
    """

    drop_book_chapter_other: bool = True
    drop_changed_title: bool = True
    drop_no_post_publication_update: bool = True

    def describe(self) -> str:
        active = [
            name
            for name, on in (
                ("book_chapter_other", self.drop_book_chapter_other),
                ("changed_title", self.drop_changed_title),
                ("no_post_publication_update", self.drop_no_post_publication_update),
            )
            if on
        ]
        return "excluded: " + (", ".join(active) if active else "nothing")


def _apply_feature_filter(
    results: Sequence[MatchResult],
    corpus_by_id: Mapping[str, PreprintRecord],
    filt: FeatureFilter,
) -> tuple[list[MatchResult], dict[str, int]]:
    kept = []
    dropped = {"book_chapter_other": 0, "changed_title": 0, "no_post_publication_update": 0}
    for result in _published(results):
        if filt.drop_book_chapter_other and result.publication.venue_type in (
            VenueType.book_chapter,
            VenueType.other,
        ):
            dropped["book_chapter_other"] += 1
            continue
        if filt.drop_changed_title and result.case is MatchCase.case3_semantic:
            dropped["changed_title"] += 1
            continue
        if filt.drop_no_post_publication_update:
            preprint = corpus_by_id.get(result.arxiv_id)
            pub_date = result.publication.published_date
            cmp = (
                compare_dates(preprint.latest.created, pub_date)
                if preprint is not None and pub_date is not None
                else None
            )
            if cmp is None or cmp <= 0:  # indeterminate counts as excluded
                dropped["no_post_publication_update"] += 1
                continue
        kept.append(result)
    return kept, dropped


def _version_bucket(n_versions: int) -> str:
    if n_versions == 1:
        return "1"
    if n_versions == 2:
        return "2"
    if n_versions <= 5:
        return "3-5"
    return ">5"


def _median_or_none(values: Sequence[float]) -> float:
    return median(values) if values else 0.0


def feature_comparison(
    results: Sequence[MatchResult],
    corpus: Sequence[PreprintRecord],
    parsed_articles: Sequence[ParsedArticle] = (),
    citations: Sequence[CitationEntry] = (),
    code_links: Sequence[CodeLink] = (),
    filt: FeatureFilter = FeatureFilter(),
    *,
    reference_slice_category: str = "cs.AI",
    reference_slice_years: tuple[int, int] = (2016, 2017),
) -> list[StudyTable]:
    """The published-vs-unpublished feature tables.

    Emits version-count buckets, author-count and section word-count
    medians, reference medians over a category/year slice, figure and
    table medians, and open-source shares. The published side honors
    ``filt``; the unpublished side is never filtered.
    """
    corpus_by_id = {p.arxiv_id: p for p in corpus}
    parsed_by_id = {a.arxiv_id: a for a in parsed_articles}
    published, dropped = _apply_feature_filter(results, corpus_by_id, filt)
    unpublished = [r for r in results if r.status is MatchStatus.unpublished]
    group_results = {
        "published": published,
        "journal": [r for r in published if r.publication.venue_type is VenueType.journal],
        "conference": [r for r in published if r.publication.venue_type is VenueType.conference],
        "unpublished": unpublished,
    }
    provenance_suffix = f" ({filt.describe()})"
    join_misses: dict[str, int] = {}

    def group_preprints(name: str) -> list[PreprintRecord]:
        out = []
        for r in group_results[name]:
            p = corpus_by_id.get(r.arxiv_id)
            if p is None:
                join_misses[name] = join_misses.get(name, 0) + 1
            else:
                out.append(p)
        return out

    tables: list[StudyTable] = []

    # (a) version-count buckets, published vs unpublished
    version_table = StudyTable(
        name="version_buckets",
        columns=[
            ("version_bucket", "str"),
            ("published_count", "int"),
            ("published_fraction", "fraction"),
            ("unpublished_count", "int"),
            ("unpublished_fraction", "fraction"),
        ],
        provenance="proportion of preprints by version count" + provenance_suffix,
        meta={"excluded": dropped},
    )
    pub_preprints = group_preprints("published")
    unpub_preprints = group_preprints("unpublished")
    pub_buckets = {b: 0 for b in VERSION_BUCKETS}
    unpub_buckets = {b: 0 for b in VERSION_BUCKETS}
    for p in pub_preprints:
        pub_buckets[_version_bucket(len(p.versions))] += 1
    for p in unpub_preprints:
        unpub_buckets[_version_bucket(len(p.versions))] += 1
    for bucket in VERSION_BUCKETS:
        version_table.add_row(
            bucket,
            pub_buckets[bucket],
            _fraction(pub_buckets[bucket], len(pub_preprints)),
            unpub_buckets[bucket],
            _fraction(unpub_buckets[bucket], len(unpub_preprints)),
        )
    tables.append(version_table)

    # (b) author count and section word-count medians
    group_cols = [("published", "float"), ("journal", "float"),
                  ("conference", "float"), ("unpublished", "float")]
    length_table = StudyTable(
        name="length_medians",
        columns=[("item", "str")] + group_cols,
        provenance="medians of author count and section word counts" + provenance_suffix,
    )
    section_items = (
        ("title_words", "title_word_count"),
        ("abstract_words", "abstract_word_count"),
        ("introduction_words", "introduction_word_count"),
        ("conclusion_words", "conclusion_word_count"),
        ("acknowledgment_words", "acknowledgment_word_count"),
    )
    author_medians = []
    for name in group_results:
        counts = [len(p.latest.authors) for p in group_preprints(name)]
        author_medians.append(_median_or_none(counts))
    length_table.add_row("author_count", *author_medians)
    for attr, label in section_items:
        row = []
        for name in group_results:
            values = []
            for p in group_preprints(name):
                article = parsed_by_id.get(p.arxiv_id)
                if article is None:
                    join_misses[f"parsed:{name}"] = join_misses.get(f"parsed:{name}", 0) + 1
                    continue
                value = getattr(article, attr)
                if value is not None:  # absent sections are excluded per item
                    values.append(value)
            row.append(_median_or_none(values))
        length_table.add_row(label, *row)
    tables.append(length_table)

    # (c) reference medians over the configured category/year slice
    y0, y1 = reference_slice_years
    ref_table = StudyTable(
        name="reference_medians",
        columns=[("item", "str")] + group_cols,
        provenance=(
            f"medians of reference count and per-paper summed reference citations, "
            f"{reference_slice_category} {y0}-{y1}" + provenance_suffix
        ),
        meta={"slice_category": reference_slice_category, "slice_years": [y0, y1]},
    )

    def in_slice(p: PreprintRecord) -> bool:
        return (
            reference_slice_category in p.categories
            and y0 <= p.first_submitted.year <= y1
        )

    ref_counts_row, ref_cites_row = [], []
    for name in group_results:
        counts, cite_sums = [], []
        for p in group_preprints(name):
            if not in_slice(p):
                continue
            article = parsed_by_id.get(p.arxiv_id)
            if article is None:
                continue
            counts.append(len(article.references))
            cite_sums.append(sum(c for _, c in article.references))
        ref_counts_row.append(_median_or_none(counts))
        ref_cites_row.append(_median_or_none(cite_sums))
    ref_table.add_row("reference_count", *ref_counts_row)
    ref_table.add_row("reference_citation_sum", *ref_cites_row)
    tables.append(ref_table)

    # (d) figure and table medians
    material_table = StudyTable(
        name="figure_table_medians",
        columns=[("item", "str")] + group_cols,
        provenance="medians of figure and table counts" + provenance_suffix,
    )
    for attr, label in (("num_figures", "figure_count"), ("num_tables", "table_count")):
        row = []
        for name in group_results:
            values = [
                getattr(parsed_by_id[p.arxiv_id], attr)
                for p in group_preprints(name)
                if p.arxiv_id in parsed_by_id
            ]
            row.append(_median_or_none(values))
        material_table.add_row(label, *row)
    tables.append(material_table)

    # (e) open-source shares and acceptance among open-source preprints
    linked_ids = {link.arxiv_id for link in code_links}
    by_id = {r.arxiv_id: r for r in results}
    code_intensive = [
        p for p in corpus
        if p.arxiv_id in by_id and any(c in CODE_INTENSIVE_CATEGORIES for c in p.categories)
    ]
    open_all = [p for p in corpus if p.arxiv_id in by_id and p.arxiv_id in linked_ids]
    open_published = [
        p for p in open_all if by_id[p.arxiv_id].status is not MatchStatus.unpublished
    ]
    denominator_all = sum(1 for p in corpus if p.arxiv_id in by_id)
    open_code_intensive = [p for p in code_intensive if p.arxiv_id in linked_ids]
    open_table = StudyTable(
        name="open_source",
        columns=[("metric", "str"), ("numerator", "int"), ("denominator", "int"),
                 ("fraction", "fraction")],
        provenance="open-source code availability and acceptance",
        meta={"code_intensive_categories": sorted(CODE_INTENSIVE_CATEGORIES)},
    )
    open_table.add_row("open_source_share", len(open_all), denominator_all,
                       _fraction(len(open_all), denominator_all))
    open_table.add_row("open_source_share_code_intensive", len(open_code_intensive),
                       len(code_intensive), _fraction(len(open_code_intensive), len(code_intensive)))
    open_table.add_row("acceptance_among_open_source", len(open_published), len(open_all),
                       _fraction(len(open_published), len(open_all)))
    tables.append(open_table)

    for table in tables:
        table.meta.setdefault("join_misses", dict(sorted(join_misses.items())))
    return tables


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

def _format_cell(value, kind: str) -> str:
    if kind == "fraction":
        return f"{value:.4f}"
    if kind == "float":
        return f"{value:.10g}"
    return str(value)


def emit(tables: Iterable[StudyTable], directory) -> list[Path]:
    """Write one CSV and one JSON file per table.

    Output is byte-identical across reruns on identical inputs: fixed
    column formats, sorted JSON keys, no timestamps.
    """
    out_dir = Path(directory)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for table in tables:
        csv_path = out_dir / f"{table.name}.csv"
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([name for name, _ in table.columns])
            for row in table.rows:
                writer.writerow([
                    _format_cell(v, kind) for v, (_, kind) in zip(row, table.columns)
                ])
        json_path = out_dir / f"{table.name}.json"
        payload = {
            "name": table.name,
            "provenance": table.provenance,
            "columns": [list(c) for c in table.columns],
            "rows": [list(row) for row in table.rows],
            "meta": table.meta,
        }
        with open(json_path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")
        written.extend([csv_path, json_path])
    return written
