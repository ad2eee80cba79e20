"""Title and author-name canonicalization plus the author-matching predicates.

Everything here is a pure function. Title normalization makes exact-title
matching robust to case, diacritics, punctuation and whitespace; the author
predicates implement the deliberately permissive, initial-tolerant equality
used throughout the matching pipeline.
"""

from __future__ import annotations

import logging
import unicodedata
from dataclasses import dataclass
from typing import Iterable, TYPE_CHECKING

if TYPE_CHECKING:  # pragma: no cover
    from .records import PreprintRecord, PublicationRecord

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NormalizedTitle:
    """A canonical form of a title alongside the string it came from."""

    text: str
    original: str

    @property
    def is_empty(self) -> bool:
        return self.text == ""


def _strip_marks(text: str) -> str:
    return "".join(ch for ch in text if not unicodedata.combining(ch))


def normalize_title(text: str) -> NormalizedTitle:
    """Canonicalize a title for exact matching.

    Compatibility-decompose, drop combining marks, casefold, delete every
    character that is neither letter, digit nor whitespace, then collapse
    whitespace runs. Idempotent: normalizing the output text again is a
    no-op.
    """
    t = unicodedata.normalize("NFKD", text)
    t = t.casefold()
    t = unicodedata.normalize("NFKD", t)
    t = _strip_marks(t)
    kept = []
    for ch in t:
        if ch.isalpha() or ch.isdigit():
            kept.append(ch)
        elif ch.isspace():
            kept.append(" ")
    out = " ".join("".join(kept).split())
    if not out:
        logger.warning("title normalized to empty string: %r", text)
    return NormalizedTitle(text=out, original=text)


@dataclass(frozen=True)
class AuthorKey:
    """Folded author-name key used for permissive equality."""

    family: str
    given_initial: str | None = None
    full_given: str | None = None

    def __post_init__(self):
        if not self.family:
            raise ValueError("family name must be non-empty")


def _fold(text: str) -> str:
    t = unicodedata.normalize("NFKD", text)
    t = _strip_marks(t)
    t = t.casefold()
    return " ".join(t.replace(".", " ").split())


def _is_initial_token(tok: str) -> bool:
    # "J" or "J."
    if len(tok) == 1 and tok.isalpha():
        return True
    return len(tok) == 2 and tok.endswith(".") and tok[0].isalpha()


def parse_author(name: str) -> AuthorKey:
    """Split a name string into a folded (family, given) key.

    Last whitespace-separated token is the family name; ``Family, Given``
    order is detected via the comma. A leading given token of length one
    (or ``X.``) contributes only an initial. Names that defeat the rules
    fall back to a key whose family is the whole folded string.
    """
    stripped = " ".join(name.split())
    if not stripped:
        raise ValueError("author name must be non-empty")

    if "," in stripped:
        family_part, _, given_part = stripped.partition(",")
        family = _fold(family_part)
        given_tokens = given_part.split()
    else:
        tokens = stripped.split()
        family = _fold(tokens[-1])
        given_tokens = tokens[:-1]

    if not family:
        # Unparseable: punctuation-only family part and similar.
        whole = _fold(stripped)
        if not whole:
            raise ValueError(f"unparseable author name: {name!r}")
        return AuthorKey(family=whole)

    if not given_tokens:
        return AuthorKey(family=family)

    first = given_tokens[0]
    if _is_initial_token(first):
        return AuthorKey(family=family, given_initial=_fold(first)[:1] or None)
    full = _fold(" ".join(given_tokens))
    if not full:
        return AuthorKey(family=family)
    return AuthorKey(family=family, given_initial=full[0], full_given=full)


def author_equal(a: AuthorKey, b: AuthorKey) -> bool:
    """True iff families match and the given initials do not disagree.

    A missing given name on either side is treated as compatible; this is
    deliberately permissive and relied on being combined with a title test.
    """
    if a.family != b.family:
        return False
    if a.given_initial is None or b.given_initial is None:
        return True
    return a.given_initial == b.given_initial


def _parse_all(names: Iterable[str]) -> list[AuthorKey]:
    keys = []
    for name in names:
        if not name or not name.strip():
            continue
        keys.append(parse_author(name))
    return keys


def first_author_match(preprint: "PreprintRecord", candidate: "PublicationRecord") -> bool:
    """True iff the latest version's first author appears among the candidate's authors."""
    latest = preprint.latest
    if not latest.authors:
        logger.warning("preprint %s has no authors on its latest version", preprint.arxiv_id)
        return False
    first = parse_author(latest.authors[0])
    return any(author_equal(first, key) for key in _parse_all(candidate.authors))


def author_overlap(authors_a: Iterable[str], authors_b: Iterable[str]) -> bool:
    """True iff any author of one list equals any author of the other."""
    keys_a = _parse_all(authors_a)
    keys_b = _parse_all(authors_b)
    return any(author_equal(a, b) for a in keys_a for b in keys_b)
