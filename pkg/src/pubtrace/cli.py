"""Command-line front end: ingest, match, pairgen, report.

Exit codes: 0 on success, 2 on input validation errors, 3 on backend
failures.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import sys
from pathlib import Path

from . import ingest, pairgen, report
from .crossref import CrossrefClient
from .errors import BackendError, PubtraceError, ValidationError
from .matcher import build_title_index, load_results, run_pipeline, write_results
from .scorers import LexicalScorer, RemoteScorer
from .stats import StatConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BACKEND = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pubtrace",
        description="Link preprints to their published versions and report the comparisons.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="parse raw inputs into canonical record files")
    p_ingest.add_argument("--arxiv", required=True, help="preprint JSON-lines file")
    p_ingest.add_argument("--dblp", help="DBLP XML file")
    p_ingest.add_argument("--pwc", help="code-link JSON file")
    p_ingest.add_argument("--citations", help="citation CSV file")
    p_ingest.add_argument("--out", required=True, help="output directory")

    p_match = sub.add_parser("match", help="run the three-case matching pipeline")
    p_match.add_argument("--corpus", required=True, help="canonical preprints JSON-lines file")
    p_match.add_argument("--index", required=True, help="canonical publications JSON-lines file")
    p_match.add_argument("--scorer", choices=("lexical", "remote"), default="lexical")
    p_match.add_argument("--remote-url", help="base URL of the remote scorer service")
    p_match.add_argument("--crossref-fixtures", help="Crossref fixture/cache directory")
    p_match.add_argument("--out", required=True, help="output results JSON-lines file")

    p_pairgen = sub.add_parser("pairgen", help="build the title-pair classification dataset")
    p_pairgen.add_argument("--corpus", required=True)
    p_pairgen.add_argument("--backend", required=True, help="'fixture:DIR' or 'live'")
    p_pairgen.add_argument("--targets", default="40000,5000,5000",
                           help="train,dev,test sample targets")
    p_pairgen.add_argument("--seed", type=int, default=0)
    p_pairgen.add_argument("--study-start", default="2008-01-01")
    p_pairgen.add_argument("--study-end", default="2017-12-31")
    p_pairgen.add_argument("--category-prefix", default="cs.")
    p_pairgen.add_argument("--out", required=True, help="output directory")

    p_report = sub.add_parser("report", help="emit the study tables")
    p_report.add_argument("--results", required=True)
    p_report.add_argument("--corpus", required=True)
    p_report.add_argument("--parsed", help="parsed-article JSON-lines file")
    p_report.add_argument("--citations", help="citation CSV file")
    p_report.add_argument("--code", help="code-link JSON file")
    p_report.add_argument("--alpha", type=float, default=0.005)
    p_report.add_argument("--out", required=True, help="output directory")
    return parser


def _cmd_ingest(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summary: dict = {"errors": {}}
    errors: list = []
    preprints = ingest.load_preprints(args.arxiv, errors=errors)
    ingest.write_preprints(preprints, out / "preprints.jsonl")
    summary["preprints"] = len(preprints)
    summary["errors"]["preprints"] = [str(e) for e in errors]
    if args.dblp:
        counters: dict = {}
        with open(args.dblp, "rb") as fh:
            publications = list(ingest.parse_dblp_stream(fh, counters=counters))
        ingest.write_publications(publications, out / "publications.jsonl")
        summary["publications"] = counters
    if args.pwc:
        link_errors: list = []
        links = ingest.load_code_links(args.pwc, errors=link_errors)
        kept, dropped = ingest.join_code_links(links, preprints)
        with open(out / "code_links.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump([{"arxiv_id": l.arxiv_id, "repo_url": l.repo_url} for l in kept],
                      fh, sort_keys=True, indent=1)
            fh.write("\n")
        summary["code_links"] = {"kept": len(kept), "dropped_unjoinable": dropped}
        summary["errors"]["code_links"] = [str(e) for e in link_errors]
    if args.citations:
        citation_errors: list = []
        citations = ingest.load_citations(args.citations, errors=citation_errors)
        ingest.write_citations(citations, out / "citations.csv")
        summary["citations"] = len(citations)
        summary["errors"]["citations"] = [str(e) for e in citation_errors]
    with open(out / "ingest_summary.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(f"ingested {summary['preprints']} preprints -> {out}")
    return EXIT_OK


def _cmd_match(args) -> int:
    corpus = ingest.load_preprints(args.corpus)
    index = build_title_index(ingest.load_publications(args.index))
    if args.scorer == "remote":
        if not args.remote_url:
            raise ValidationError("--remote-url is required with --scorer remote")
        scorer = RemoteScorer(args.remote_url)
    else:
        scorer = LexicalScorer()
    crossref = CrossrefClient(args.crossref_fixtures) if args.crossref_fixtures else None
    stats: dict = {}
    results = run_pipeline(corpus, index, scorer, crossref=crossref, stats=stats)
    write_results(results, args.out)
    for case, entry in stats["summary"].items():
        print(f"{case}: {entry['count']} ({entry['fraction']:.3f})")
    return EXIT_OK


def _parse_backend(spec: str) -> CrossrefClient:
    if spec == "live":
        return CrossrefClient("crossref_cache", live=True)
    if spec.startswith("fixture:"):
        return CrossrefClient(spec.split(":", 1)[1])
    raise ValidationError(f"--backend must be 'fixture:DIR' or 'live', got {spec!r}")


def _cmd_pairgen(args) -> int:
    corpus = ingest.load_preprints(args.corpus)
    backend = _parse_backend(args.backend)
    try:
        targets = tuple(int(t) for t in args.targets.split(","))
        train_t, dev_t, test_t = targets
    except ValueError:
        raise ValidationError(f"--targets must be three comma-separated integers, got {args.targets!r}")
    split = pairgen.SplitSpec(
        study_start=_dt.date.fromisoformat(args.study_start),
        study_end=_dt.date.fromisoformat(args.study_end),
        category_prefix=args.category_prefix,
        train_target=train_t,
        dev_target=dev_t,
        test_target=test_t,
        seed=args.seed,
    )
    manifest = pairgen.build_dataset(corpus, split, backend, args.out)
    for partition, entry in manifest["partitions"].items():
        print(f"{partition}: {entry['count']} samples "
              f"({entry['positives']} positive / {entry['negatives']} negative)")
    return EXIT_OK


def _cmd_report(args) -> int:
    results = load_results(args.results)
    corpus = ingest.load_preprints(args.corpus)
    config = StatConfig(alpha=args.alpha)
    tables = [
        report.published_type_distribution(results),
        report.yearly_counts_and_rate(results, corpus),
        report.category_distribution(results, corpus),
        report.venue_distribution(results),
        report.submission_stage(results, corpus),
    ]
    citations = ingest.load_citations(args.citations) if args.citations else []
    if citations:
        tables.append(report.citation_summary(results, citations, config))
    parsed = ingest.load_parsed_articles(args.parsed) if args.parsed else []
    code_links = ingest.load_code_links(args.code) if args.code else []
    if parsed or code_links:
        tables.extend(
            report.feature_comparison(results, corpus, parsed, citations, code_links)
        )
    written = report.emit(tables, args.out)
    print(f"wrote {len(written)} files to {args.out}")
    return EXIT_OK


_COMMANDS = {
    "ingest": _cmd_ingest,
    "match": _cmd_match,
    "pairgen": _cmd_pairgen,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except PubtraceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
