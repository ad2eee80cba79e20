import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import pubtrace.matcher as matcher
from pubtrace.crossref import CrossrefClient, write_fixture
from pubtrace.errors import EmptyInput, ScorerUnavailable
from pubtrace.matcher import (
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
    publication_order_key,
    result_from_json,
    result_to_json,
    retrieve_candidates,
    run_pipeline,
)
from pubtrace.normalize import normalize_title
from pubtrace.records import Source, VenueType
from pubtrace.scorers import LexicalScorer

from conftest import make_preprint, make_publication


class FixedScorer:
    """Scores pairs from an explicit title_b -> probability table."""

    def __init__(self, table, default=0.0):
        self.table = dict(table)
        self.default = default

    def score_pairs(self, pairs):
        return [self.table.get(b, self.default) for _, b in pairs]


class TestCase1:
    def test_doi_present(self):
        preprint = make_preprint(doi="10.1x/abc")
        result = classify_case1(preprint)
        assert result.case is MatchCase.case1_direct
        assert result.status is MatchStatus.published_same_title
        assert result.publication.doi == "10.1x/abc"
        assert result.publication.source is Source.arxiv

    def test_journal_ref_only_venue_unknown(self):
        preprint = make_preprint(journal_ref="Proc. FOO 2015")
        result = classify_case1(preprint)
        assert result.case is MatchCase.case1_direct
        assert result.publication.venue_type is VenueType.unknown
        assert result.publication.venue_name == "Proc. FOO 2015"

    def test_neither_field_absent(self):
        assert classify_case1(make_preprint()) is None

    def test_doi_resolution_through_cache(self, tmp_path):
        preprint = make_preprint(doi="10.7/x", titles=("Resolvable Title",))
        resolved = make_publication(
            title="Resolvable Title", venue_type=VenueType.conference, doi="10.7/X",
            source=Source.crossref,
        )
        write_fixture(tmp_path, "Resolvable Title", [resolved])
        result = classify_case1(preprint, crossref=CrossrefClient(tmp_path))
        assert result.publication.venue_type is VenueType.conference

    def test_unresolvable_doi_keeps_synthesized_record(self, tmp_path):
        preprint = make_preprint(doi="10.7/x")
        result = classify_case1(preprint, crossref=CrossrefClient(tmp_path))
        assert result.publication.venue_type is VenueType.unknown


class TestTitleIndex:
    def test_collision_list_preserved(self):
        pubs = [
            make_publication(title="Same Title", venue_name="A"),
            make_publication(title="SAME TITLE!", venue_name="B"),
        ]
        index = build_title_index(pubs)
        hits = index.lookup(normalize_title("same title").text)
        assert len(hits) == 2

    def test_empty_input(self):
        index = build_title_index([])
        assert len(index) == 0
        assert index.lookup("anything") == []

    def test_bulk_lookup_matches_linear_scan(self):
        rng = random.Random(4)
        words = [f"word{i:03d}" for i in range(300)]
        pubs = [
            make_publication(title=" ".join(rng.sample(words, 6)) + f" uid{i:05d}")
            for i in range(10_000)
        ]
        index = build_title_index(pubs)
        for pub in rng.sample(pubs, 50):
            key = normalize_title(pub.title).text
            oracle = [p for p in pubs if normalize_title(p.title).text == key]
            assert index.lookup(key) == oracle


class TestCase2:
    def test_exact_hit_with_first_author(self):
        preprint = make_preprint(titles=("An Exact Title",), authors=("Alice Kim", "Bo Chen"))
        index = build_title_index([make_publication(title="An exact title!", authors=("A. Kim",))])
        result = classify_case2(preprint, index)
        assert result.case is MatchCase.case2_exact
        assert result.evidence.first_author_matched is True

    def test_hit_without_author_falls_through(self):
        preprint = make_preprint(titles=("An Exact Title",), authors=("Alice Kim",))
        index = build_title_index([make_publication(title="An Exact Title", authors=("Q. Novak",))])
        assert classify_case2(preprint, index) is None

    def test_tie_break_prefers_doi_bearing(self):
        preprint = make_preprint(titles=("Shared Title",), authors=("Alice Kim",))
        journal = make_publication(
            title="Shared Title", authors=("Alice Kim",), venue_type=VenueType.journal,
            doi="10.2/j", published_date="2017-01",
        )
        conference = make_publication(
            title="Shared Title", authors=("Alice Kim",), venue_type=VenueType.conference,
            doi=None, published_date="2015-01",
        )
        index = build_title_index([conference, journal])
        # hand-applied order: DOI-bearing record wins despite the later date
        assert classify_case2(preprint, index).publication is journal

    def test_tie_break_earlier_date_when_both_have_doi(self):
        preprint = make_preprint(titles=("Shared Title",), authors=("Alice Kim",))
        early = make_publication(title="Shared Title", authors=("Alice Kim",),
                                 doi="10.2/a", published_date="2015-01")
        late = make_publication(title="Shared Title", authors=("Alice Kim",),
                                doi="10.2/b", published_date="2016-01")
        index = build_title_index([late, early])
        assert classify_case2(preprint, index).publication is early


class TestRetrieveCandidates:
    def test_fixture_passthrough(self, tmp_path):
        preprint = make_preprint(titles=("Query Title",))
        write_fixture(tmp_path, "Query Title",
                      [make_publication(title=f"R{i} result entry") for i in range(10)])
        candidates = retrieve_candidates(preprint, crossref=CrossrefClient(tmp_path))
        assert len(candidates) == 10

    def test_token_overlap_rule(self):
        preprint = make_preprint(titles=("Segmentation of rectal tumors",))
        sharing_two = make_publication(title="Deep rectal image segmentation")
        sharing_one = make_publication(title="Broad segmentation survey")
        short_tokens = make_publication(title="Of the and a")
        index = build_title_index([sharing_two, sharing_one, short_tokens])
        candidates = retrieve_candidates(preprint, index=index)
        assert candidates == [sharing_two]

    def test_no_candidates_anywhere(self):
        preprint = make_preprint(titles=("Utterly Unique Phrasing",))
        assert retrieve_candidates(preprint, index=build_title_index([])) == []

    def test_token_cap_by_overlap_count(self):
        preprint = make_preprint(titles=("alpha beta gamma delta epsilon",))
        best = make_publication(title="alpha beta gamma delta")
        weak = [make_publication(title=f"alpha beta filler{i:02d}") for i in range(12)]
        index = build_title_index([*weak, best])
        candidates = retrieve_candidates(preprint, index=index)
        assert len(candidates) == 10
        assert candidates[0] is best


class TestCase3:
    def test_high_score_with_author(self):
        preprint = make_preprint(authors=("Alice Kim",))
        candidate = make_publication(title="Changed Title", authors=("A. Kim",))
        result = classify_case3(preprint, [candidate], FixedScorer({"Changed Title": 0.9}))
        assert result.case is MatchCase.case3_semantic
        assert result.status is MatchStatus.published_changed_title
        assert result.evidence.scorer_probability == 0.9
        assert result.evidence.matched_title == "Changed Title"

    def test_high_score_without_author_rejected(self):
        preprint = make_preprint(authors=("Alice Kim",))
        candidate = make_publication(title="Changed Title", authors=("Q. Novak",))
        assert classify_case3(preprint, [candidate], FixedScorer({"Changed Title": 0.9})) is None

    def test_score_exactly_half_rejected(self):
        preprint = make_preprint(authors=("Alice Kim",))
        candidate = make_publication(title="Changed Title", authors=("A. Kim",))
        assert classify_case3(preprint, [candidate], FixedScorer({"Changed Title": 0.5})) is None

    def test_empty_candidates(self):
        assert classify_case3(make_preprint(), [], LexicalScorer()) is None

    def test_picks_highest_score(self):
        preprint = make_preprint(authors=("Alice Kim",))
        low = make_publication(title="Low Variant", authors=("A. Kim",))
        high = make_publication(title="High Variant", authors=("A. Kim",))
        scorer = FixedScorer({"Low Variant": 0.6, "High Variant": 0.8})
        assert classify_case3(preprint, [low, high], scorer).publication is high

    def test_permutation_invariant(self):
        rng = random.Random(8)
        preprint = make_preprint(authors=("Alice Kim",))
        candidates = [
            make_publication(title=f"Variant {i}", authors=("A. Kim",), doi=f"10.3/{i}")
            for i in range(6)
        ]
        scorer = FixedScorer({f"Variant {i}": 0.6 for i in range(6)})
        baseline = classify_case3(preprint, candidates, scorer)
        for _ in range(10):
            shuffled = candidates[:]
            rng.shuffle(shuffled)
            assert classify_case3(preprint, shuffled, scorer) == baseline


class TestBaseline:
    def test_identical_title_shared_author(self):
        preprint = make_preprint(titles=("Stable Title",), authors=("Alice Kim", "Bo Chen"))
        candidate = make_publication(title="Stable Title", authors=("Bo Chen",))
        result = baseline_fuzzy_match(preprint, [candidate])
        assert result is not None
        assert result.publication is candidate

    def test_similarity_just_below_threshold(self):
        # construct a pair with edit similarity 0.69: 100-char title, 31 edits
        base = "a" * 100
        variant = "b" * 31 + "a" * 69
        preprint = make_preprint(titles=(base,), authors=("Alice Kim",))
        candidate = make_publication(title=variant, authors=("Alice Kim",))
        assert baseline_fuzzy_match(preprint, [candidate]) is None

    def test_similarity_at_threshold_matches(self):
        base = "a" * 100
        variant = "b" * 30 + "a" * 70
        preprint = make_preprint(titles=(base,), authors=("Alice Kim",))
        candidate = make_publication(title=variant, authors=("Alice Kim",))
        assert baseline_fuzzy_match(preprint, [candidate]) is not None

    def test_author_overlap_required(self):
        preprint = make_preprint(titles=("Stable Title",), authors=("Alice Kim",))
        candidate = make_publication(title="Stable Title", authors=("Q. Novak",))
        assert baseline_fuzzy_match(preprint, [candidate]) is None


def _pipeline_fixture(tmp_path):
    """10 preprints with known ground truth: 3 case1, 3 case2, 2 case3, 2 unpublished."""
    preprints, publications = [], []
    truth = {}
    for i in range(3):
        preprints.append(make_preprint(f"c1.{i}", titles=(f"Direct analysis {i} of things",),
                                       doi=f"10.1/{i}"))
        truth[f"c1.{i}"] = MatchCase.case1_direct
    for i in range(3):
        title = f"Exact topic {i} with stable naming"
        preprints.append(make_preprint(f"c2.{i}", titles=(title,), authors=("Alice Kim",)))
        publications.append(make_publication(title=title, authors=("A. Kim",)))
        truth[f"c2.{i}"] = MatchCase.case2_exact
    fixtures = {}
    for i in range(2):
        title = f"Quantized sparse manifold pursuit study {i}"
        changed = f"Sparse manifold pursuit study revisited {i}"
        preprints.append(make_preprint(f"c3.{i}", titles=(title,), authors=("Alice Kim",)))
        fixtures[title] = [make_publication(title=changed, authors=("A. Kim",),
                                            source=Source.crossref)]
        truth[f"c3.{i}"] = MatchCase.case3_semantic
    for i in range(2):
        preprints.append(make_preprint(f"un.{i}", titles=(f"Never published draft {i}",)))
        fixtures[f"Never published draft {i}"] = []
        truth[f"un.{i}"] = MatchCase.none
    for query, records in fixtures.items():
        write_fixture(tmp_path, query, records)
    return preprints, publications, CrossrefClient(tmp_path), truth


class TestRunPipeline:
    def test_all_doi_corpus_is_all_case1(self):
        corpus = [make_preprint(f"p{i}", doi=f"10.1/{i}") for i in range(5)]
        results = run_pipeline(corpus, build_title_index([]), LexicalScorer())
        assert all(r.case is MatchCase.case1_direct for r in results)

    def test_ten_record_fixture_attribution(self, tmp_path):
        preprints, publications, client, truth = _pipeline_fixture(tmp_path)
        results = run_pipeline(preprints, build_title_index(publications),
                               LexicalScorer(), crossref=client)
        assert [r.arxiv_id for r in results] == [p.arxiv_id for p in preprints]
        for result in results:
            assert result.case is truth[result.arxiv_id], result.arxiv_id

    def test_strict_priority_cascade(self, tmp_path, monkeypatch):
        preprints, publications, client, truth = _pipeline_fixture(tmp_path)
        calls = {"case2": [], "case3": []}
        real_case2 = matcher.classify_case2
        real_case3 = matcher.classify_case3

        def counting_case2(preprint, index):
            calls["case2"].append(preprint.arxiv_id)
            return real_case2(preprint, index)

        def counting_case3(preprint, candidates, scorer, **kwargs):
            calls["case3"].append(preprint.arxiv_id)
            return real_case3(preprint, candidates, scorer, **kwargs)

        monkeypatch.setattr(matcher, "classify_case2", counting_case2)
        monkeypatch.setattr(matcher, "classify_case3", counting_case3)
        run_pipeline(preprints, build_title_index(publications), LexicalScorer(), crossref=client)
        case1_ids = {i for i, c in truth.items() if c is MatchCase.case1_direct}
        case2_ids = {i for i, c in truth.items() if c is MatchCase.case2_exact}
        assert case1_ids.isdisjoint(calls["case2"])  # case1 settled, case2 never consulted
        assert case1_ids.isdisjoint(calls["case3"])
        assert case2_ids.isdisjoint(calls["case3"])

    def test_statuses_partition_corpus(self, tmp_path):
        preprints, publications, client, _ = _pipeline_fixture(tmp_path)
        results = run_pipeline(preprints, build_title_index(publications),
                               LexicalScorer(), crossref=client)
        assert len(results) == len(preprints)
        published = [r for r in results if r.publication is not None]
        assert all(r.status is not MatchStatus.unpublished for r in published)
        counts = matcher.summarize_results(results)
        assert sum(entry["count"] for entry in counts.values()) == len(preprints)

    def test_scorer_failure_degrades_to_lexical(self, tmp_path):
        class BrokenScorer:
            def score_pairs(self, pairs):
                raise ScorerUnavailable("down")

        preprints, publications, client, truth = _pipeline_fixture(tmp_path)
        stats = {}
        results = run_pipeline(preprints, build_title_index(publications),
                               BrokenScorer(), crossref=client, stats=stats)
        for result in results:  # lexical fallback still resolves the plants
            assert result.case is truth[result.arxiv_id]
        assert len(stats["scorer_substitutions"]) == 4  # the case3 + unpublished records

    def test_backend_errors_counted_not_fatal(self):
        # no fixtures at all: every retrieval misses, the batch still completes
        corpus = [make_preprint(f"p{i}", titles=(f"Missing fixture {i}",)) for i in range(3)]
        stats = {}
        results = run_pipeline(corpus, build_title_index([]), LexicalScorer(),
                               crossref=CrossrefClient("/nonexistent-fixtures"), stats=stats)
        assert all(r.status is MatchStatus.unpublished for r in results)
        assert stats["backend_errors"] == 3


class TestMatchResultInvariants:
    def test_unpublished_with_publication_rejected(self):
        with pytest.raises(ValueError):
            MatchResult("p", MatchStatus.unpublished, MatchCase.none, make_publication())

    def test_case3_requires_probability_above_threshold(self):
        with pytest.raises(ValueError):
            MatchResult("p", MatchStatus.published_changed_title, MatchCase.case3_semantic,
                        make_publication(), Evidence(scorer_probability=0.5,
                                                     first_author_matched=True))

    def test_case2_requires_same_title_status(self):
        with pytest.raises(ValueError):
            MatchResult("p", MatchStatus.published_changed_title, MatchCase.case2_exact,
                        make_publication())

    def test_round_trip_json(self):
        result = MatchResult(
            "p", MatchStatus.published_changed_title, MatchCase.case3_semantic,
            make_publication(doi="10.4/z"),
            Evidence(scorer_probability=0.75, first_author_matched=True, matched_title="X"),
        )
        assert result_from_json(result_to_json(result)) == result


class TestEvaluate:
    def test_worked_example(self):
        # tp=2 fp=1 fn=1 tn=1
        predicted = [True, True, True, False, False]
        gold = [True, True, False, True, False]
        report = evaluate(predicted, gold)
        assert report.accuracy == 0.6
        assert report.f1 == pytest.approx(2 * 2 / (2 * 2 + 1 + 1))
        assert (report.confusion.tp, report.confusion.fp,
                report.confusion.fn, report.confusion.tn) == (2, 1, 1, 1)

    def test_all_correct(self):
        report = evaluate([True, False, True], [True, False, True])
        assert report.accuracy == 1.0
        assert report.f1 == 1.0

    def test_empty_raises(self):
        with pytest.raises(EmptyInput):
            evaluate([], [])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            evaluate([True], [True, False])

    def test_no_positives_anywhere(self):
        report = evaluate([False, False], [False, False])
        assert report.accuracy == 1.0
        assert report.f1 == 1.0  # vacuously perfect, documented convention


class TestOrderKey:
    def test_ordering_rules(self):
        with_doi = make_publication(doi="10.1/a", published_date="2019")
        early = make_publication(published_date="2015-01")
        late = make_publication(published_date="2016-01")
        no_date = make_publication(published_date=None)
        ranked = sorted([no_date, late, early, with_doi], key=publication_order_key)
        assert ranked[0] is with_doi  # DOI-bearing first despite later date
        assert ranked[1] is early
        assert ranked[2] is late
        assert ranked[3] is no_date
