from pubtrace.matcher import MatchCase
from pubtrace.normalize import first_author_match, normalize_title
from pubtrace.scorers import LexicalScorer, edit_similarity
from pubtrace.synth import (
    DISTRACTOR_CEILING,
    HARD_EDIT_CEILING,
    LEXICAL_PLANT_MARGIN,
    generate_corpus,
    write_corpus,
)


class TestGenerator:
    def test_plant_counts(self):
        corpus = generate_corpus(5, 6, 4, 5, seed=3)
        counts = {}
        for case in corpus.truth.values():
            counts[case] = counts.get(case, 0) + 1
        assert counts == {
            MatchCase.case1_direct: 5,
            MatchCase.case2_exact: 6,
            MatchCase.case3_semantic: 4,
            MatchCase.none: 5,
        }

    def test_deterministic_for_seed(self):
        a = generate_corpus(4, 4, 4, 4, seed=11)
        b = generate_corpus(4, 4, 4, 4, seed=11)
        assert [p.arxiv_id for p in a.preprints] == [p.arxiv_id for p in b.preprints]
        assert [p.latest.title for p in a.preprints] == [p.latest.title for p in b.preprints]
        assert a.planted_titles == b.planted_titles

    def test_case3_plants_clear_lexical_margin(self):
        corpus = generate_corpus(0, 0, 12, 0, seed=5)
        scorer = LexicalScorer()
        by_id = {p.arxiv_id: p for p in corpus.preprints}
        hard_plants = 0
        for arxiv_id, planted in corpus.planted_titles.items():
            preprint = by_id[arxiv_id]
            [score] = scorer.score_pairs([(preprint.latest.title, planted)])
            assert score > LEXICAL_PLANT_MARGIN
            sim = edit_similarity(
                normalize_title(preprint.latest.title).text, normalize_title(planted).text
            )
            if sim < HARD_EDIT_CEILING:
                hard_plants += 1
        assert hard_plants >= 4  # the baseline-defeating subset exists

    def test_distractors_stay_below_ceiling(self):
        corpus = generate_corpus(0, 0, 6, 6, seed=5)
        scorer = LexicalScorer()
        by_norm_title = {
            normalize_title(p.latest.title).text: p for p in corpus.preprints
        }
        for query, candidates in corpus.fixtures.items():
            preprint = by_norm_title[query]
            planted = corpus.planted_titles.get(preprint.arxiv_id)
            for candidate in candidates:
                if candidate.title == planted:
                    continue
                [score] = scorer.score_pairs([(preprint.latest.title, candidate.title)])
                assert score < DISTRACTOR_CEILING
                assert not first_author_match(preprint, candidate)

    def test_write_corpus_layout(self, tmp_path):
        corpus = generate_corpus(2, 2, 2, 2, seed=3)
        paths = write_corpus(corpus, tmp_path)
        assert paths["preprints"].exists()
        assert paths["publications"].exists()
        assert len(list(paths["fixtures"].glob("*.json"))) == len(corpus.fixtures)
