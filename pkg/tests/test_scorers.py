import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from pubtrace.errors import ScorerUnavailable
from pubtrace.normalize import normalize_title
from pubtrace.scorers import (
    LexicalScorer,
    RemoteScorer,
    char_trigrams,
    edit_similarity,
    levenshtein,
    trigram_jaccard,
    validate_score_response,
)

RECTAL_PAIR = (
    "A Fully Convolutional Network for Rectal Cancer Segmentation",
    "Reducing the Model Variance of Rectal Cancer Segmentation Network",
)


class TestPrimitives:
    @given(st.text(max_size=30), st.text(max_size=30))
    @settings(max_examples=200)
    def test_levenshtein_matches_recursive_oracle(self, a, b):
        assert levenshtein(a, b) == oracles.levenshtein_recursive(a, b)

    def test_trigrams_short_string(self):
        assert char_trigrams("ab") == {"ab": 1}
        assert char_trigrams("") == {}

    @given(st.text(alphabet="abcdef ", max_size=40), st.text(alphabet="abcdef ", max_size=40))
    @settings(max_examples=200)
    def test_trigram_jaccard_matches_oracle(self, a, b):
        assert trigram_jaccard(a, b) == pytest.approx(
            oracles.trigram_jaccard_multiset(a, b), abs=1e-12
        )

    def test_edit_similarity_both_empty(self):
        assert edit_similarity("", "") == 1.0


class TestLexicalScorer:
    def test_identical_titles_score_one(self):
        assert LexicalScorer().score_pairs([("Deep Learning", "Deep Learning")]) == [1.0]

    def test_disjoint_alphabets_equal_length(self):
        # zero trigram overlap and edit distance equal to the length
        [score] = LexicalScorer().score_pairs([("aaaa", "zzzz")])
        assert score == 0.0

    def test_rectal_pair_matches_independent_oracle(self):
        [score] = LexicalScorer().score_pairs([RECTAL_PAIR])
        expected = oracles.lexical_score(
            normalize_title(RECTAL_PAIR[0]).text, normalize_title(RECTAL_PAIR[1]).text
        )
        assert score == pytest.approx(expected, abs=1e-12)
        assert 0.0 < score < 1.0

    def test_empty_title_scores_zero(self):
        assert LexicalScorer().score_pairs([("", "something")]) == [0.0]

    def test_order_preserved(self):
        pairs = [("a b c", "a b c"), ("a b c", "x y z")]
        scores = LexicalScorer().score_pairs(pairs)
        assert scores[0] == 1.0 and scores[1] < 0.5

    @given(st.text(alphabet="abcdefgh ", min_size=1, max_size=30),
           st.text(alphabet="abcdefgh ", min_size=1, max_size=30))
    @settings(max_examples=150)
    def test_symmetric_and_bounded(self, a, b):
        scorer = LexicalScorer()
        [s_ab] = scorer.score_pairs([(a, b)])
        [s_ba] = scorer.score_pairs([(b, a)])
        assert s_ab == pytest.approx(s_ba, abs=1e-12)
        assert 0.0 <= s_ab <= 1.0

    @given(st.text(alphabet="abcdefgh ", min_size=1, max_size=30))
    @settings(max_examples=150)
    def test_self_score_is_one_for_nonempty_normalized(self, title):
        if normalize_title(title).is_empty:
            return
        assert LexicalScorer().score_pairs([(title, title)]) == [1.0]


class _StubHandler(BaseHTTPRequestHandler):
    behavior = "ok"

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length))
        n = len(body["pairs"])
        if self.behavior == "ok":
            payload = {"probs": [0.25] * n}
            code = 200
        elif self.behavior == "short":
            payload = {"probs": [0.25] * max(0, n - 1)}
            code = 200
        elif self.behavior == "bad_schema":
            payload = {"scores": []}
            code = 200
        else:
            payload = {"error": "boom"}
            code = 500
        data = json.dumps(payload).encode()
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_server():
    server = HTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield server
    server.shutdown()


class TestRemoteScorer:
    def test_round_trip(self, stub_server):
        _StubHandler.behavior = "ok"
        scorer = RemoteScorer(f"http://127.0.0.1:{stub_server.server_port}")
        assert scorer.score_pairs([("a", "b"), ("c", "d")]) == [0.25, 0.25]

    def test_empty_pairs_short_circuit(self):
        scorer = RemoteScorer("http://127.0.0.1:1")  # would fail if contacted
        assert scorer.score_pairs([]) == []

    def test_non_2xx_raises(self, stub_server):
        _StubHandler.behavior = "error"
        scorer = RemoteScorer(f"http://127.0.0.1:{stub_server.server_port}")
        with pytest.raises(ScorerUnavailable):
            scorer.score_pairs([("a", "b")])

    def test_length_mismatch_raises(self, stub_server):
        _StubHandler.behavior = "short"
        scorer = RemoteScorer(f"http://127.0.0.1:{stub_server.server_port}")
        with pytest.raises(ScorerUnavailable):
            scorer.score_pairs([("a", "b"), ("c", "d")])

    def test_schema_violation_raises(self, stub_server):
        _StubHandler.behavior = "bad_schema"
        scorer = RemoteScorer(f"http://127.0.0.1:{stub_server.server_port}")
        with pytest.raises(ScorerUnavailable):
            scorer.score_pairs([("a", "b")])

    def test_unreachable_raises(self):
        scorer = RemoteScorer("http://127.0.0.1:9", timeout=0.2)
        with pytest.raises(ScorerUnavailable):
            scorer.score_pairs([("a", "b")])


class TestValidateScoreResponse:
    def test_accepts_valid(self):
        assert validate_score_response({"probs": [0.0, 0.5, 1.0]}, 3) == [0.0, 0.5, 1.0]

    @pytest.mark.parametrize("payload", [
        {"probs": [1.5]},
        {"probs": [-0.1]},
        {"probs": [float("nan")]},
        {"probs": ["high"]},
        {"probs": [True]},
        {"wrong": []},
        [0.5],
    ])
    def test_rejects_invalid(self, payload):
        with pytest.raises(ScorerUnavailable):
            validate_score_response(payload, 1)
