"""Parsers and loaders for the five input sources, plus sample selection.

The ingestion formats are frozen, line- or element-delimited schemas (see
README); harvesting from the live services happens upstream and is out of
scope here. All parsers are streaming and tolerate per-record damage:
malformed records are reported through an optional ``errors`` collector
instead of aborting the batch.
"""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import logging
import xml.etree.ElementTree as ET
from typing import IO, Any, Iterable, Iterator

from .errors import DuplicateArxivId, MalformedRecord, XmlSyntax
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
)

logger = logging.getLogger(__name__)

_SECTION_FIELDS = (
    "title_words",
    "abstract_words",
    "introduction_words",
    "conclusion_words",
    "acknowledgment_words",
)


def _iter_lines(stream) -> Iterator[str]:
    if isinstance(stream, (str, bytes)):
        raise TypeError("pass an open stream or an iterable of lines, not a path")
    for line in stream:
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        yield line


def _collect(errors: list | None, err: Exception) -> None:
    if errors is not None:
        errors.append(err)
    logger.warning("%s", err)


# ---------------------------------------------------------------------------
# Preprint JSON-lines
# ---------------------------------------------------------------------------

def preprint_from_json(obj: dict[str, Any]) -> PreprintRecord:
    """Build a validated PreprintRecord from one decoded JSON-lines object."""
    if not isinstance(obj, dict):
        raise ValueError("record must be a JSON object")
    try:
        arxiv_id = obj["arxiv_id"]
        raw_versions = obj["versions"]
        categories = obj["categories"]
    except KeyError as exc:
        raise ValueError(f"missing field {exc.args[0]!r}") from None
    if not isinstance(raw_versions, list) or not raw_versions:
        raise ValueError("'versions' must be a non-empty list")
    if not isinstance(categories, list) or not categories:
        raise ValueError("'categories' must be a non-empty list")

    versions = []
    for v in raw_versions:
        try:
            index = v["v"]
            title = v["title"]
            authors = v["authors"]
            created = PartialDate.parse(v["created"])
        except KeyError as exc:
            raise ValueError(f"version missing field {exc.args[0]!r}") from None
        if created.precision != "day":
            raise ValueError(f"version created date must be a full date: {v['created']!r}")
        if not isinstance(authors, list) or not all(isinstance(a, str) for a in authors):
            raise ValueError("'authors' must be a list of strings")
        versions.append(
            VersionEntry(
                version_index=index,
                title=title,
                authors=tuple(authors),
                created=created,
                parse_degraded=not authors,
            )
        )
    return PreprintRecord(
        arxiv_id=arxiv_id,
        versions=tuple(versions),
        categories=tuple(categories),
        abstract=obj.get("abstract", ""),
        doi=obj.get("doi"),
        journal_ref=obj.get("journal_ref"),
        comments=obj.get("comments"),
    )


def preprint_to_json(record: PreprintRecord) -> dict[str, Any]:
    """Inverse of :func:`preprint_from_json`."""
    obj: dict[str, Any] = {
        "arxiv_id": record.arxiv_id,
        "versions": [
            {
                "v": v.version_index,
                "title": v.title,
                "authors": list(v.authors),
                "created": v.created.isoformat(),
            }
            for v in record.versions
        ],
        "categories": list(record.categories),
        "abstract": record.abstract,
    }
    if record.doi is not None:
        obj["doi"] = record.doi
    if record.journal_ref is not None:
        obj["journal_ref"] = record.journal_ref
    if record.comments is not None:
        obj["comments"] = record.comments
    return obj


def parse_preprint_stream(
    stream: IO | Iterable[str],
    *,
    errors: list | None = None,
) -> Iterator[PreprintRecord]:
    """Parse line-delimited preprint records, yielding them in input order.

    Malformed lines and duplicate ids are reported through ``errors`` (and
    logged) without aborting the stream; blank lines are skipped.
    """
    seen: set[str] = set()
    for line_no, line in enumerate(_iter_lines(stream), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            _collect(errors, MalformedRecord(line_no, f"invalid JSON: {exc.msg}"))
            continue
        try:
            record = preprint_from_json(obj)
        except ValueError as exc:
            _collect(errors, MalformedRecord(line_no, str(exc)))
            continue
        if record.arxiv_id in seen:
            _collect(errors, DuplicateArxivId(record.arxiv_id, line_no))
            continue
        seen.add(record.arxiv_id)
        yield record


def write_preprints(records: Iterable[PreprintRecord], path) -> int:
    """Write records to a JSON-lines file; returns the number written."""
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(json.dumps(preprint_to_json(record), sort_keys=True, ensure_ascii=False))
            fh.write("\n")
            n += 1
    return n


def load_preprints(path, *, errors: list | None = None) -> list[PreprintRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        return list(parse_preprint_stream(fh, errors=errors))


# ---------------------------------------------------------------------------
# Publication records (canonical JSON form, shared with the Crossref cache)
# ---------------------------------------------------------------------------

def publication_from_json(obj: dict[str, Any]) -> PublicationRecord:
    try:
        source = Source(obj["source"])
        title = obj["title"]
    except KeyError as exc:
        raise ValueError(f"missing field {exc.args[0]!r}") from None
    date = obj.get("published_date")
    return PublicationRecord(
        source=source,
        title=title,
        authors=tuple(obj.get("authors", ())),
        venue_name=obj.get("venue_name"),
        venue_type=VenueType(obj.get("venue_type", "unknown")),
        published_date=PartialDate.parse(date) if date else None,
        doi=obj.get("doi"),
    )


def publication_to_json(record: PublicationRecord) -> dict[str, Any]:
    obj: dict[str, Any] = {
        "source": record.source.value,
        "title": record.title,
        "authors": list(record.authors),
        "venue_type": record.venue_type.value,
    }
    if record.venue_name is not None:
        obj["venue_name"] = record.venue_name
    if record.published_date is not None:
        obj["published_date"] = record.published_date.isoformat()
    if record.doi is not None:
        obj["doi"] = record.doi
    return obj


def write_publications(records: Iterable[PublicationRecord], path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(json.dumps(publication_to_json(record), sort_keys=True, ensure_ascii=False))
            fh.write("\n")
            n += 1
    return n


def load_publications(path, *, errors: list | None = None) -> list[PublicationRecord]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                out.append(publication_from_json(json.loads(line)))
            except (ValueError, json.JSONDecodeError) as exc:
                _collect(errors, MalformedRecord(line_no, str(exc)))
    return out


# ---------------------------------------------------------------------------
# DBLP XML
# ---------------------------------------------------------------------------

_DBLP_VENUE_TYPE = {
    "article": VenueType.journal,
    "inproceedings": VenueType.conference,
    "incollection": VenueType.book_chapter,
    "proceedings": VenueType.other,
    "book": VenueType.other,
    "phdthesis": VenueType.other,
    "mastersthesis": VenueType.other,
    "www": VenueType.other,
}

CORR_VENUE = "CoRR"


def _element_text(elem: ET.Element | None) -> str:
    if elem is None:
        return ""
    return " ".join("".join(elem.itertext()).split())


def _extract_doi(record_elem: ET.Element) -> str | None:
    for ee in record_elem.findall("ee"):
        text = (ee.text or "").strip()
        marker = "doi.org/"
        if marker in text:
            return text.split(marker, 1)[1] or None
    return None


def parse_dblp_stream(
    stream: IO,
    *,
    counters: dict[str, int] | None = None,
) -> Iterator[PublicationRecord]:
    """Stream publication records out of a DBLP-vocabulary XML file.

    Memory stays bounded by one record regardless of file size. Records
    under the CoRR venue are preprints, not publications: they are counted
    under ``corr_excluded`` and skipped. Element kinds outside the DBLP
    vocabulary are counted under ``unknown_elements`` and skipped. A syntax
    error aborts with :class:`XmlSyntax`.
    """
    if counters is None:
        counters = {}
    counters.setdefault("records", 0)
    counters.setdefault("corr_excluded", 0)
    counters.setdefault("unknown_elements", 0)
    counters.setdefault("missing_title", 0)

    root: ET.Element | None = None
    depth = 0
    try:
        for event, elem in ET.iterparse(stream, events=("start", "end")):
            if event == "start":
                depth += 1
                if root is None:
                    root = elem
                continue
            depth -= 1
            if depth != 1:  # only direct children of the root are records
                continue
            venue_type = _DBLP_VENUE_TYPE.get(elem.tag)
            if venue_type is None:
                counters["unknown_elements"] += 1
                root.remove(elem)
                continue
            title = _element_text(elem.find("title"))
            venue_name = _element_text(elem.find("journal")) or _element_text(elem.find("booktitle")) or None
            year_text = _element_text(elem.find("year"))
            authors = tuple(_element_text(a) for a in elem.findall("author"))
            doi = _extract_doi(elem)
            root.remove(elem)  # keep memory bounded by one record
            if venue_name == CORR_VENUE:
                counters["corr_excluded"] += 1
                continue
            if not title:
                counters["missing_title"] += 1
                continue
            counters["records"] += 1
            yield PublicationRecord(
                source=Source.dblp,
                title=title,
                authors=authors,
                venue_name=venue_name,
                venue_type=venue_type,
                published_date=PartialDate(int(year_text)) if year_text.isdigit() else None,
                doi=doi,
            )
    except ET.ParseError as exc:
        raise XmlSyntax(exc.position, str(exc)) from exc


def parse_dblp_bytes(data: bytes, **kwargs) -> Iterator[PublicationRecord]:
    return parse_dblp_stream(io.BytesIO(data), **kwargs)


# ---------------------------------------------------------------------------
# Sample selection
# ---------------------------------------------------------------------------

def select_sample(
    corpus: Iterable[PreprintRecord],
    first_submission_range: tuple[_dt.date, _dt.date],
    category_prefix: str,
) -> list[PreprintRecord]:
    """Select the study sample: v1 submitted in the closed date interval and
    at least one category starting with the prefix (case-insensitive)."""
    start, end = first_submission_range
    prefix = category_prefix.lower()
    out = []
    for record in corpus:
        created = record.first_submitted.to_date()
        if not start <= created <= end:
            continue
        if any(cat.lower().startswith(prefix) for cat in record.categories):
            out.append(record)
    return out


# ---------------------------------------------------------------------------
# Code links, citations, parsed articles
# ---------------------------------------------------------------------------

def load_code_links(path, *, errors: list | None = None) -> list[CodeLink]:
    """Load the code-link JSON export: a list of {"arxiv_id", "repo_url"}."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise MalformedRecord(None, "code-link file must contain a JSON array")
    out = []
    for i, entry in enumerate(data):
        try:
            out.append(CodeLink(arxiv_id=entry["arxiv_id"], repo_url=entry["repo_url"]))
        except (TypeError, KeyError, ValueError) as exc:
            _collect(errors, MalformedRecord(i, f"bad code-link entry: {exc}"))
    return out


def join_code_links(
    links: Iterable[CodeLink], corpus: Iterable[PreprintRecord]
) -> tuple[list[CodeLink], int]:
    """Keep links whose arxiv_id exists in the corpus; count the rest."""
    known = {p.arxiv_id for p in corpus}
    kept, dropped = [], 0
    for link in links:
        if link.arxiv_id in known:
            kept.append(link)
        else:
            dropped += 1
    if dropped:
        logger.warning("dropped %d code links with unknown arxiv ids", dropped)
    return kept, dropped


def load_citations(path, *, errors: list | None = None) -> list[CitationEntry]:
    """Load the citation CSV (``key,variant,citation_count``).

    Both variants of the same paper are retained; downstream consumers sum
    them. Rows violating the schema are collected as errors.
    """
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        expected = {"key", "variant", "citation_count"}
        if reader.fieldnames is None or not expected.issubset(reader.fieldnames):
            raise MalformedRecord(1, f"citation CSV must have columns {sorted(expected)}")
        for row_no, row in enumerate(reader, start=2):
            try:
                count = int(row["citation_count"])
                out.append(
                    CitationEntry(
                        key=row["key"],
                        citation_count=count,
                        variant=CitationVariant(row["variant"]),
                    )
                )
            except ValueError as exc:
                _collect(errors, MalformedRecord(row_no, f"bad citation row: {exc}"))
    return out


def write_citations(entries: Iterable[CitationEntry], path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["key", "variant", "citation_count"])
        for e in entries:
            writer.writerow([e.key, e.variant.value, e.citation_count])
            n += 1
    return n


def load_parsed_articles(path, *, errors: list | None = None) -> list[ParsedArticle]:
    """Load pre-parsed article features (JSON lines, see README schema)."""
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                kwargs = {name: obj.get(name) for name in _SECTION_FIELDS}
                out.append(
                    ParsedArticle(
                        arxiv_id=obj["arxiv_id"],
                        num_figures=obj.get("num_figures", 0),
                        num_tables=obj.get("num_tables", 0),
                        references=tuple(
                            (title, int(count)) for title, count in obj.get("references", [])
                        ),
                        **kwargs,
                    )
                )
            except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                _collect(errors, MalformedRecord(line_no, f"bad parsed-article line: {exc}"))
    return out


def write_parsed_articles(articles: Iterable[ParsedArticle], path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for a in articles:
            obj: dict[str, Any] = {"arxiv_id": a.arxiv_id}
            for name in _SECTION_FIELDS:
                value = getattr(a, name)
                if value is not None:
                    obj[name] = value
            obj["num_figures"] = a.num_figures
            obj["num_tables"] = a.num_tables
            obj["references"] = [[title, count] for title, count in a.references]
            fh.write(json.dumps(obj, sort_keys=True, ensure_ascii=False))
            fh.write("\n")
            n += 1
    return n
