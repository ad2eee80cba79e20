"""The three-case matching pipeline, its evaluation, and the fuzzy baseline.

Matching is a strict priority cascade per preprint:

* case 1 — the preprint's own metadata names a DOI or a publication venue;
* case 2 — a publication with the identical normalized title exists whose
  author list contains the preprint's first author;
* case 3 — a retrieved candidate under a different title is accepted by
  the title-pair scorer (probability strictly above 0.5) AND carries the
  first author.

Anything else is unpublished. Later cases are never consulted once an
earlier one fires.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Sequence

from .crossref import CrossrefClient
from .errors import BackendError, EmptyInput, ScorerUnavailable
from .ingest import publication_from_json, publication_to_json
from .normalize import first_author_match, normalize_title, author_overlap
from .records import PreprintRecord, PublicationRecord, Source, VenueType
from .scorers import LexicalScorer, Scorer, edit_similarity

logger = logging.getLogger(__name__)

CANDIDATE_LIMIT = 10
SCORE_THRESHOLD = 0.5        # strictly greater-than; equality is a non-match
BASELINE_SIMILARITY = 0.7    # inclusive, approximation of the compared method
TOKEN_MIN_LENGTH = 4
TOKEN_MIN_SHARED = 2

# Reference values measured on the full-scale corpus (141,961 computer
# science preprints, first submitted 2008-2017) with the trained scorer.
# Context for sizing expectations only; reproducing them needs the complete
# metadata snapshots and full-scale fine-tuning, so nothing tests them.
FULL_SCALE_REFERENCE = {
    "sample_size": 141_961,
    "case1_doi_fraction": 0.221,
    "case1_venue_fraction": 0.066,
    "case2_fraction": 0.370,
    "case3_fraction": 0.114,
    "published_same_title_fraction": 0.657,
    "scorer_accuracy": 0.78,
    "scorer_f1": 0.72,
    "baseline_accuracy": 0.50,
    "baseline_f1": 0.67,
}


class MatchStatus(str, Enum):
    published_same_title = "published_same_title"
    published_changed_title = "published_changed_title"
    unpublished = "unpublished"


class MatchCase(str, Enum):
    case1_direct = "case1_direct"
    case2_exact = "case2_exact"
    case3_semantic = "case3_semantic"
    none = "none"


@dataclass(frozen=True)
class Evidence:
    """Why a match was made.

    ``first_author_matched`` records the author condition that the match
    passed: the first-author test for pipeline results, the any-author
    overlap test for baseline results.
    """

    scorer_probability: float | None = None
    first_author_matched: bool | None = None
    matched_title: str | None = None


@dataclass(frozen=True)
class MatchResult:
    """The pipeline's verdict for one preprint."""

    arxiv_id: str
    status: MatchStatus
    case: MatchCase
    publication: PublicationRecord | None = None
    evidence: Evidence = field(default_factory=Evidence)

    def __post_init__(self):
        unpublished = self.status is MatchStatus.unpublished
        if unpublished != (self.case is MatchCase.none) or unpublished != (self.publication is None):
            raise ValueError("unpublished status, case none and absent publication must coincide")
        if self.case in (MatchCase.case1_direct, MatchCase.case2_exact):
            if self.status is not MatchStatus.published_same_title:
                raise ValueError(f"{self.case.value} implies published_same_title")
        if self.case is MatchCase.case3_semantic:
            if self.status is not MatchStatus.published_changed_title:
                raise ValueError("case3 implies published_changed_title")
            ev = self.evidence
            if ev.scorer_probability is None or not ev.scorer_probability > SCORE_THRESHOLD:
                raise ValueError("case3 requires a scorer probability above the threshold")
            if ev.first_author_matched is not True:
                raise ValueError("case3 requires the author condition to have matched")


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    fn: int
    tn: int


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    f1: float
    confusion: Confusion


def _unpublished(arxiv_id: str) -> MatchResult:
    return MatchResult(arxiv_id, MatchStatus.unpublished, MatchCase.none)


def publication_order_key(pub: PublicationRecord):
    """Deterministic preference order among equally qualifying publications:
    DOI-bearing first, then earlier published date, source name, title, DOI."""
    date_key = pub.published_date.sort_key() if pub.published_date else (9999, 12, 31)
    return (0 if pub.doi else 1, date_key, pub.source.value, pub.title, pub.doi or "")


# ---------------------------------------------------------------------------
# Case 1: direct metadata
# ---------------------------------------------------------------------------

def classify_case1(
    preprint: PreprintRecord, *, crossref: CrossrefClient | None = None
) -> MatchResult | None:
    """Match on the preprint's own DOI or journal reference.

    The publication is synthesized from the preprint metadata with venue
    type unknown unless the DOI resolves through the Crossref cache (the
    cache is consulted under the preprint's latest title query).
    """
    if not preprint.doi and not preprint.journal_ref:
        return None
    latest = preprint.latest
    publication = PublicationRecord(
        source=Source.arxiv,
        title=latest.title,
        authors=latest.authors,
        venue_name=preprint.journal_ref,
        venue_type=VenueType.unknown,
        doi=preprint.doi,
    )
    if crossref is not None and preprint.doi:
        try:
            candidates = crossref.fetch(latest.title, CANDIDATE_LIMIT)
        except BackendError:
            candidates = []
        doi = preprint.doi.lower()
        for cand in candidates:
            if cand.doi and cand.doi.lower() == doi:
                publication = cand
                break
    return MatchResult(
        preprint.arxiv_id,
        MatchStatus.published_same_title,
        MatchCase.case1_direct,
        publication,
        Evidence(matched_title=publication.title),
    )


# ---------------------------------------------------------------------------
# Case 2: exact normalized title + first author
# ---------------------------------------------------------------------------

class TitleIndex:
    """Exact-title lookup plus a token inverted index for candidate recall."""

    def __init__(self, publications: Iterable[PublicationRecord]):
        self._pubs = list(publications)
        self._exact: dict[str, list[PublicationRecord]] = {}
        self._tokens: dict[str, set[int]] = {}
        for i, pub in enumerate(self._pubs):
            key = normalize_title(pub.title).text
            self._exact.setdefault(key, []).append(pub)
            for tok in set(t for t in key.split() if len(t) >= TOKEN_MIN_LENGTH):
                self._tokens.setdefault(tok, set()).add(i)

    def __len__(self) -> int:
        return len(self._pubs)

    def lookup(self, normalized_text: str) -> list[PublicationRecord]:
        """All publications whose normalized title equals the key (collisions preserved)."""
        return list(self._exact.get(normalized_text, ()))

    def token_candidates(
        self, normalized_text: str, cap: int = CANDIDATE_LIMIT
    ) -> list[PublicationRecord]:
        """Publications sharing at least two long tokens with the query,
        best overlap first, capped."""
        tokens = {t for t in normalized_text.split() if len(t) >= TOKEN_MIN_LENGTH}
        overlap: Counter[int] = Counter()
        for tok in tokens:
            for i in self._tokens.get(tok, ()):
                overlap[i] += 1
        eligible = [i for i, cnt in overlap.items() if cnt >= TOKEN_MIN_SHARED]
        eligible.sort(key=lambda i: (-overlap[i], publication_order_key(self._pubs[i])))
        return [self._pubs[i] for i in eligible[:cap]]


def build_title_index(publications: Iterable[PublicationRecord]) -> TitleIndex:
    return TitleIndex(publications)


def classify_case2(preprint: PreprintRecord, index: TitleIndex) -> MatchResult | None:
    """Match on identical normalized title with the first author present."""
    key = normalize_title(preprint.latest.title).text
    if not key:
        return None
    for pub in sorted(index.lookup(key), key=publication_order_key):
        if first_author_match(preprint, pub):
            return MatchResult(
                preprint.arxiv_id,
                MatchStatus.published_same_title,
                MatchCase.case2_exact,
                pub,
                Evidence(first_author_matched=True, matched_title=pub.title),
            )
    return None


# ---------------------------------------------------------------------------
# Case 3: semantic title-pair classification
# ---------------------------------------------------------------------------

def retrieve_candidates(
    preprint: PreprintRecord,
    *,
    crossref: CrossrefClient | None = None,
    index: TitleIndex | None = None,
) -> list[PublicationRecord]:
    """Candidates for changed-title matching: the Crossref top ten for the
    latest title plus token-overlapping publication-index records.

    Backend errors propagate to the caller.
    """
    latest_title = preprint.latest.title
    out: list[PublicationRecord] = []
    if crossref is not None:
        out.extend(crossref.fetch(latest_title, CANDIDATE_LIMIT))
    if index is not None:
        out.extend(index.token_candidates(normalize_title(latest_title).text))
    return out


def classify_case3(
    preprint: PreprintRecord,
    candidates: Sequence[PublicationRecord],
    scorer: Scorer,
    *,
    scores: Sequence[float] | None = None,
) -> MatchResult | None:
    """Accept the best candidate whose score exceeds 0.5 and whose author
    list passes the first-author test. ``scores`` short-circuits the scorer
    when probabilities were computed in a prior batch."""
    if not candidates:
        return None
    latest_title = preprint.latest.title
    if scores is None:
        scores = scorer.score_pairs([(latest_title, c.title) for c in candidates])
    qualifying = [
        (prob, cand)
        for prob, cand in zip(scores, candidates)
        if prob > SCORE_THRESHOLD and first_author_match(preprint, cand)
    ]
    if not qualifying:
        return None
    qualifying.sort(key=lambda pc: (-pc[0], publication_order_key(pc[1])))
    prob, best = qualifying[0]
    return MatchResult(
        preprint.arxiv_id,
        MatchStatus.published_changed_title,
        MatchCase.case3_semantic,
        best,
        Evidence(scorer_probability=prob, first_author_matched=True, matched_title=best.title),
    )


def baseline_fuzzy_match(
    preprint: PreprintRecord, candidates: Sequence[PublicationRecord]
) -> MatchResult | None:
    """Approximation of the compared fuzzy-matching method.

    Matches when normalized-title edit similarity is at least 0.7 and any
    author overlaps. Used only for side-by-side comparisons, never by the
    pipeline.
    """
    latest = preprint.latest
    nq = normalize_title(latest.title).text
    qualifying = []
    for cand in candidates:
        sim = edit_similarity(nq, normalize_title(cand.title).text)
        if sim >= BASELINE_SIMILARITY and author_overlap(latest.authors, cand.authors):
            qualifying.append((sim, cand))
    if not qualifying:
        return None
    qualifying.sort(key=lambda sc: (-sc[0], publication_order_key(sc[1])))
    sim, best = qualifying[0]
    return MatchResult(
        preprint.arxiv_id,
        MatchStatus.published_changed_title,
        MatchCase.case3_semantic,
        best,
        Evidence(scorer_probability=sim, first_author_matched=True, matched_title=best.title),
    )


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------

def run_pipeline(
    corpus: Sequence[PreprintRecord],
    index: TitleIndex,
    scorer: Scorer,
    *,
    crossref: CrossrefClient | None = None,
    stats: dict[str, Any] | None = None,
) -> list[MatchResult]:
    """Apply the cascade to every preprint, in input order.

    Scorer calls are batched across all case-3 candidates. A failing remote
    scorer degrades to the built-in lexical scorer (recorded per affected
    record in ``stats``); per-record backend errors are counted, never
    fatal.
    """
    if stats is None:
        stats = {}
    stats.setdefault("backend_errors", 0)
    stats.setdefault("scorer_substitutions", [])

    results: list[MatchResult | None] = [None] * len(corpus)
    pending: list[tuple[int, PreprintRecord, list[PublicationRecord]]] = []

    for pos, preprint in enumerate(corpus):
        result = classify_case1(preprint, crossref=crossref)
        if result is None:
            result = classify_case2(preprint, index)
        if result is not None:
            results[pos] = result
            continue
        try:
            candidates = retrieve_candidates(preprint, crossref=crossref, index=index)
        except BackendError as exc:
            stats["backend_errors"] += 1
            logger.warning("candidate retrieval failed for %s: %s", preprint.arxiv_id, exc)
            candidates = retrieve_candidates(preprint, index=index)
        pending.append((pos, preprint, candidates))

    # Batch every title pair through the scorer in one call.
    pairs = [
        (preprint.latest.title, cand.title)
        for _, preprint, candidates in pending
        for cand in candidates
    ]
    active_scorer = scorer
    try:
        probs = active_scorer.score_pairs(pairs)
    except ScorerUnavailable as exc:
        active_scorer = LexicalScorer()
        for _, preprint, _ in pending:
            stats["scorer_substitutions"].append(preprint.arxiv_id)
            logger.warning(
                "scorer unavailable for %s, substituting lexical scorer: %s",
                preprint.arxiv_id,
                exc,
            )
        probs = active_scorer.score_pairs(pairs)

    offset = 0
    for pos, preprint, candidates in pending:
        scores = probs[offset:offset + len(candidates)]
        offset += len(candidates)
        result = classify_case3(preprint, candidates, active_scorer, scores=scores)
        results[pos] = result if result is not None else _unpublished(preprint.arxiv_id)

    final = [r for r in results if r is not None]
    summary = summarize_results(final)
    logger.info(
        "pipeline: %s",
        ", ".join(f"{k}={v['count']} ({v['fraction']:.3f})" for k, v in summary.items()),
    )
    stats["summary"] = summary
    return final


def summarize_results(results: Sequence[MatchResult]) -> dict[str, dict[str, float]]:
    """Per-case counts and fractions over a result list."""
    total = len(results)
    out: dict[str, dict[str, float]] = {}
    for case in MatchCase:
        count = sum(1 for r in results if r.case is case)
        out[case.value] = {"count": count, "fraction": count / total if total else 0.0}
    return out


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def evaluate(predicted: Sequence[bool], gold: Sequence[bool]) -> EvalReport:
    """Accuracy and positive-class F1 over boolean label lists.

    F1 is 2*tp / (2*tp + fp + fn); a degenerate case with no positives
    anywhere and no mistakes scores 1.0.
    """
    if len(predicted) != len(gold):
        raise ValueError(f"length mismatch: {len(predicted)} vs {len(gold)}")
    if not predicted:
        raise EmptyInput("nothing to evaluate")
    tp = sum(1 for p, g in zip(predicted, gold) if p and g)
    fp = sum(1 for p, g in zip(predicted, gold) if p and not g)
    fn = sum(1 for p, g in zip(predicted, gold) if not p and g)
    tn = sum(1 for p, g in zip(predicted, gold) if not p and not g)
    accuracy = (tp + tn) / len(predicted)
    denom = 2 * tp + fp + fn
    f1 = 1.0 if denom == 0 else 2 * tp / denom
    return EvalReport(accuracy=accuracy, f1=f1, confusion=Confusion(tp, fp, fn, tn))


# ---------------------------------------------------------------------------
# Result (de)serialization
# ---------------------------------------------------------------------------

def result_to_json(result: MatchResult) -> dict[str, Any]:
    obj: dict[str, Any] = {
        "arxiv_id": result.arxiv_id,
        "status": result.status.value,
        "case": result.case.value,
        "publication": publication_to_json(result.publication) if result.publication else None,
    }
    ev: dict[str, Any] = {}
    if result.evidence.scorer_probability is not None:
        ev["scorer_probability"] = result.evidence.scorer_probability
    if result.evidence.first_author_matched is not None:
        ev["first_author_matched"] = result.evidence.first_author_matched
    if result.evidence.matched_title is not None:
        ev["matched_title"] = result.evidence.matched_title
    obj["evidence"] = ev
    return obj


def result_from_json(obj: dict[str, Any]) -> MatchResult:
    ev = obj.get("evidence", {})
    return MatchResult(
        arxiv_id=obj["arxiv_id"],
        status=MatchStatus(obj["status"]),
        case=MatchCase(obj["case"]),
        publication=publication_from_json(obj["publication"]) if obj.get("publication") else None,
        evidence=Evidence(
            scorer_probability=ev.get("scorer_probability"),
            first_author_matched=ev.get("first_author_matched"),
            matched_title=ev.get("matched_title"),
        ),
    )


def write_results(results: Iterable[MatchResult], path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for result in results:
            fh.write(json.dumps(result_to_json(result), sort_keys=True, ensure_ascii=False))
            fh.write("\n")
            n += 1
    return n


def load_results(path) -> list[MatchResult]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(result_from_json(json.loads(line)))
    return out
