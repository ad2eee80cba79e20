"""Title-pair scorers satisfying the shared scorer contract.

A scorer maps a list of ``(title_a, title_b)`` pairs to a list of
probabilities in ``[0, 1]``, order-preserving and deterministic for a
fixed configuration. :class:`LexicalScorer` is the built-in, dependency
free implementation; :class:`RemoteScorer` speaks the ``POST /score``
wire protocol of the external scoring service.
"""

from __future__ import annotations

import logging
from collections import Counter
from typing import Protocol, Sequence

from .errors import ScorerUnavailable
from .normalize import normalize_title

logger = logging.getLogger(__name__)

Pair = tuple[str, str]


class Scorer(Protocol):
    def score_pairs(self, pairs: Sequence[Pair]) -> list[float]: ...


def levenshtein(a: str, b: str) -> int:
    """Edit distance with unit costs, two-row dynamic programming."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a):
        current = [i + 1]
        for j, cb in enumerate(b):
            current.append(min(
                previous[j + 1] + 1,        # deletion
                current[j] + 1,             # insertion
                previous[j] + (ca != cb),   # substitution
            ))
        previous = current
    return previous[-1]


def edit_similarity(a: str, b: str) -> float:
    """1 - distance/maxlen; two empty strings count as identical."""
    maxlen = max(len(a), len(b))
    if maxlen == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / maxlen


def char_trigrams(s: str) -> Counter:
    """Multiset of character trigrams; strings shorter than 3 map to themselves."""
    if not s:
        return Counter()
    if len(s) < 3:
        return Counter({s: 1})
    return Counter(s[i:i + 3] for i in range(len(s) - 2))


def trigram_jaccard(a: str, b: str) -> float:
    """Jaccard similarity of trigram multisets (min counts over max counts)."""
    ta, tb = char_trigrams(a), char_trigrams(b)
    if not ta and not tb:
        return 0.0
    inter = sum((ta & tb).values())
    union = sum((ta | tb).values())
    return inter / union


class LexicalScorer:
    """Deterministic lexical stand-in scorer.

    Scores ``0.5 * trigram_jaccard + 0.5 * edit_similarity`` over
    normalized titles, clamped to ``[0, 1]``. Identical non-empty titles
    score exactly 1.0; a pair involving an empty normalized title scores
    0.0.
    """

    name = "lexical"

    def score_pairs(self, pairs: Sequence[Pair]) -> list[float]:
        return [self._score_one(a, b) for a, b in pairs]

    @staticmethod
    def _score_one(a: str, b: str) -> float:
        na = normalize_title(a).text
        nb = normalize_title(b).text
        if not na or not nb:
            return 0.0
        j3 = trigram_jaccard(na, nb)
        sim = 1.0 - levenshtein(na, nb) / max(len(na), len(nb))
        return min(1.0, max(0.0, 0.5 * j3 + 0.5 * sim))


class RemoteScorer:
    """Client for the remote scoring service.

    Request: ``POST {base_url}/score`` with ``{"pairs": [{"a": ..., "b": ...}]}``.
    Response: ``{"probs": [...]}``, same length and order. Any transport
    failure, non-2xx status or schema mismatch raises
    :class:`ScorerUnavailable`.
    """

    name = "remote"

    def __init__(self, base_url: str, timeout: float = 30.0, session=None):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        if session is None:
            import requests

            session = requests.Session()
        self._session = session

    def score_pairs(self, pairs: Sequence[Pair]) -> list[float]:
        if not pairs:
            return []
        body = {"pairs": [{"a": a, "b": b} for a, b in pairs]}
        try:
            resp = self._session.post(f"{self.base_url}/score", json=body, timeout=self.timeout)
        except Exception as exc:
            raise ScorerUnavailable(f"scorer request failed: {exc}") from exc
        if not 200 <= resp.status_code < 300:
            raise ScorerUnavailable(f"scorer returned HTTP {resp.status_code}")
        try:
            payload = resp.json()
        except ValueError as exc:
            raise ScorerUnavailable("scorer response is not JSON") from exc
        return validate_score_response(payload, len(pairs))


def validate_score_response(payload, expected: int) -> list[float]:
    """Check a /score response against the wire schema and return the probs."""
    if not isinstance(payload, dict) or "probs" not in payload:
        raise ScorerUnavailable("scorer response missing 'probs'")
    probs = payload["probs"]
    if not isinstance(probs, list) or len(probs) != expected:
        raise ScorerUnavailable(
            f"scorer returned {len(probs) if isinstance(probs, list) else 'non-list'} probs, expected {expected}"
        )
    out = []
    for p in probs:
        if isinstance(p, bool) or not isinstance(p, (int, float)):
            raise ScorerUnavailable(f"non-numeric probability: {p!r}")
        p = float(p)
        if not (0.0 <= p <= 1.0):  # also rejects NaN
            raise ScorerUnavailable(f"probability out of range: {p!r}")
        out.append(p)
    return out
