"""Synthetic corpora with planted ground truth.

The generator plants a known matching outcome for every preprint and
verifies each plant against the real matching primitives while building,
so a generated corpus is attribution-complete by construction: direct
metadata matches, exact-title matches, changed-title matches reachable by
the lexical scorer, and unpublished records with only distractor
candidates. The plant list is the oracle for pipeline tests.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

from .crossref import write_fixture
from .ingest import write_preprints, write_publications
from .matcher import MatchCase
from .normalize import normalize_title
from .records import (
    PartialDate,
    PreprintRecord,
    PublicationRecord,
    Source,
    VenueType,
    VersionEntry,
)
from .scorers import LexicalScorer, edit_similarity

_WORDS = (
    "adaptive sparse robust latent deep neural convolutional recurrent "
    "bayesian variational stochastic distributed parallel scalable efficient "
    "network model framework method approach algorithm system architecture "
    "representation embedding attention transformer graph kernel manifold "
    "segmentation classification detection recognition estimation prediction "
    "optimization inference learning reasoning planning retrieval ranking "
    "clustering regression sampling pruning quantization distillation fusion "
    "image video speech language text code protein molecular clinical medical "
    "semantic syntactic temporal spatial spectral causal adversarial generative "
    "supervised unsupervised multimodal multitask transfer federated online "
    "analysis synthesis evaluation benchmark dataset annotation calibration "
    "uncertainty interpretability fairness privacy security verification "
    "compression acceleration hardware memory energy latency throughput "
    "recommendation dialogue translation summarization parsing grounding "
    "navigation manipulation control perception tracking mapping localization"
).split()

_FAMILY_NAMES = (
    "kim chen gupta novak rossi tanaka muller garcia santos kowalski "
    "johansson petrov yamamoto silva haddad okafor svensson moreau keller "
    "ivanov dubois larsen horvat fischer brandt lindgren costa sato vargas "
    "nakamura weiss olsen romano duran varga marsh becker holm fontana"
).split()

_GIVEN_NAMES = (
    "alice bo carla dmitri elena farid grace hiro ingrid jun karin liang "
    "maria noah olga pavel quinn rosa stefan tara umar vera wen xenia yara zoe"
).split()

_CS_CATEGORIES = (
    "cs.CV cs.LG cs.CL cs.AI cs.IT cs.NE cs.IR cs.RO cs.DS cs.CR".split()
)
_CROSS_CATEGORIES = "math.CO stat.ML math.IT eess".split()

LEXICAL_PLANT_MARGIN = 0.55   # planted case-3 pairs must clear this score
DISTRACTOR_CEILING = 0.45     # distractor pairs must stay below this score
HARD_EDIT_CEILING = 0.65      # hard plants stay under the fuzzy-baseline threshold


@dataclass
class SyntheticCorpus:
    """A generated corpus plus everything needed to run and grade a pipeline."""

    preprints: list[PreprintRecord] = field(default_factory=list)
    publications: list[PublicationRecord] = field(default_factory=list)
    fixtures: dict[str, list[PublicationRecord]] = field(default_factory=dict)
    truth: dict[str, MatchCase] = field(default_factory=dict)
    planted_titles: dict[str, str] = field(default_factory=dict)


class _Generator:
    def __init__(self, seed: int):
        self.rng = random.Random(seed)
        self.used_titles: set[str] = set()
        self.scorer = LexicalScorer()

    def title_words(self, n_words: int | None = None) -> list[str]:
        n = n_words or self.rng.randint(7, 9)
        for _ in range(200):
            words = self.rng.sample(_WORDS, n)
            if normalize_title(" ".join(words)).text not in self.used_titles:
                self.used_titles.add(normalize_title(" ".join(words)).text)
                return words
        raise RuntimeError("title pool exhausted")

    def register(self, title: str) -> str:
        self.used_titles.add(normalize_title(title).text)
        return title

    def person(self, families_in_use: set[str], *, initial: bool = False) -> str:
        family = self.rng.choice([f for f in _FAMILY_NAMES if f not in families_in_use])
        families_in_use.add(family)
        given = self.rng.choice(_GIVEN_NAMES)
        if initial:
            return f"{given[0].upper()}. {family.capitalize()}"
        return f"{given.capitalize()} {family.capitalize()}"

    def authors(self, families_in_use: set[str], n: int | None = None) -> list[str]:
        return [self.person(families_in_use) for _ in range(n or self.rng.randint(1, 4))]

    def date_in(self, year: int) -> PartialDate:
        return PartialDate(year, self.rng.randint(1, 12), self.rng.randint(1, 28))

    def later_date(self, after: PartialDate, *, year_only: bool = False) -> PartialDate:
        year = after.year + self.rng.randint(0, 2)
        if year_only:
            return PartialDate(year + 1)
        month = self.rng.randint(1, 12)
        if year == after.year:
            month = min(12, (after.month or 1) + self.rng.randint(1, 6))
        return PartialDate(year, month, self.rng.randint(1, 28))


def _as_pub_author(rng: random.Random, name: str) -> str:
    """Render an author for a publication record, sometimes initial-only."""
    if rng.random() < 0.5:
        given, _, family = name.partition(" ")
        return f"{given[0].upper()}. {family}"
    return name


def _versions(
    gen: _Generator, title: str, authors: list[str], year: int, n_versions: int
) -> tuple[VersionEntry, ...]:
    created = gen.date_in(year)
    versions = []
    for i in range(1, n_versions + 1):
        versions.append(
            VersionEntry(version_index=i, title=title, authors=tuple(authors), created=created)
        )
        created = gen.later_date(created)
    return tuple(versions)


def _categories(gen: _Generator) -> list[str]:
    cats = [gen.rng.choice(_CS_CATEGORIES)]
    if gen.rng.random() < 0.3:
        cats.append(gen.rng.choice(_CROSS_CATEGORIES))
    return cats


def _perturb(gen: _Generator, words: list[str], hard: bool) -> list[str]:
    rng = gen.rng
    out = list(words)
    if hard:
        # rotate the leading words to the back: keeps most trigrams intact
        # but wrecks the edit alignment, which the fuzzy baseline relies on
        out = out[2:] + out[:2]
        if rng.random() < 0.5:
            i = rng.randrange(len(out) - 1)
            out[i], out[i + 1] = out[i + 1], out[i]
    else:
        op = rng.choice(("drop", "replace", "swap"))
        if op == "drop" and len(out) > 6:
            out.pop(rng.randrange(len(out)))
        elif op == "replace":
            fresh = rng.choice([w for w in _WORDS if w not in out])
            out[rng.randrange(len(out))] = fresh
        else:
            i = rng.randrange(len(out) - 1)
            out[i], out[i + 1] = out[i + 1], out[i]
    return out


def _planted_changed_title(gen: _Generator, words: list[str], hard: bool) -> str:
    """A changed title verified to be lexically reachable (and, for hard
    plants, out of reach of the fuzzy baseline)."""
    base = " ".join(words)
    nbase = normalize_title(base).text
    for attempt in range(100):
        candidate_words = _perturb(gen, words, hard)
        candidate = " ".join(candidate_words)
        ncand = normalize_title(candidate).text
        if ncand == nbase or ncand in gen.used_titles:
            continue
        score = gen.scorer.score_pairs([(base, candidate)])[0]
        if score <= LEXICAL_PLANT_MARGIN:
            continue
        sim = edit_similarity(nbase, ncand)
        if hard and sim >= HARD_EDIT_CEILING:
            continue
        if not hard and sim < HARD_EDIT_CEILING:
            continue
        gen.used_titles.add(ncand)
        return candidate
    raise RuntimeError("could not plant a changed title within the margins")


def _distractor(gen: _Generator, query_title: str, families_in_use: set[str]) -> PublicationRecord:
    """A candidate that neither the scorer nor the author tests accept."""
    for attempt in range(100):
        words = gen.title_words()
        title = " ".join(words)
        if gen.scorer.score_pairs([(query_title, title)])[0] < DISTRACTOR_CEILING:
            return PublicationRecord(
                source=Source.crossref,
                title=title,
                authors=tuple(gen.authors(set(families_in_use))),
                venue_name="Journal of Synthetic Results",
                venue_type=VenueType.journal,
                published_date=PartialDate(gen.rng.randint(2009, 2019)),
            )
        gen.used_titles.discard(normalize_title(title).text)
    raise RuntimeError("could not generate a low-scoring distractor")


def generate_corpus(
    n_case1: int = 50,
    n_case2: int = 60,
    n_case3: int = 40,
    n_unpublished: int = 50,
    seed: int = 7,
) -> SyntheticCorpus:
    """Generate a corpus with the requested per-case plant counts."""
    gen = _Generator(seed)
    corpus = SyntheticCorpus()
    counter = 0

    def next_id() -> str:
        nonlocal counter
        counter += 1
        return f"synth.{counter:04d}"

    def base_preprint(**overrides) -> tuple[str, list[str], list[str], PreprintRecord]:
        words = gen.title_words()
        title = " ".join(words).capitalize()
        gen.used_titles.add(normalize_title(title).text)
        families: set[str] = set()
        authors = gen.authors(families)
        record = PreprintRecord(
            arxiv_id=next_id(),
            versions=_versions(gen, title, authors, gen.rng.randint(2008, 2017),
                               gen.rng.choice((1, 1, 2, 2, 3, 4))),
            categories=tuple(_categories(gen)),
            abstract="Synthetic abstract for pipeline testing.",
            **overrides,
        )
        return title, words, authors, record

    # case 1: direct metadata (half DOI, half venue string)
    for i in range(n_case1):
        if i % 2 == 0:
            _, _, _, record = base_preprint(doi=f"10.9999/synth.{i:04d}")
            # half of the DOI records resolve through the fixture cache
            if i % 4 == 0:
                latest = record.latest
                resolved = PublicationRecord(
                    source=Source.crossref,
                    title=latest.title,
                    authors=tuple(_as_pub_author(gen.rng, a) for a in latest.authors),
                    venue_name="Transactions on Synthetic Computing",
                    venue_type=VenueType.journal if i % 8 == 0 else VenueType.conference,
                    published_date=gen.later_date(latest.created),
                    doi=record.doi,
                )
                corpus.fixtures[normalize_title(latest.title).text] = [resolved]
        else:
            _, _, _, record = base_preprint(journal_ref=f"Proc. Synthetic Conf. {2010 + i % 8}")
        corpus.preprints.append(record)
        corpus.truth[record.arxiv_id] = MatchCase.case1_direct

    # case 2: exact normalized title in the publication index, first author present
    for i in range(n_case2):
        title, _, authors, record = base_preprint()
        published = PublicationRecord(
            source=Source.dblp if i % 2 == 0 else Source.crossref,
            title=title.upper() if i % 3 == 0 else title,
            authors=tuple(_as_pub_author(gen.rng, a) for a in authors),
            venue_name="Synthetic Letters" if i % 2 == 0 else "Symposium on Synthetic Methods",
            venue_type=VenueType.journal if i % 2 == 0 else VenueType.conference,
            published_date=gen.later_date(record.latest.created, year_only=i % 5 == 0),
            doi=f"10.5555/pub.{i:04d}" if i % 2 == 0 else None,
        )
        corpus.preprints.append(record)
        corpus.publications.append(published)
        corpus.truth[record.arxiv_id] = MatchCase.case2_exact
        corpus.planted_titles[record.arxiv_id] = published.title

    # case 3: changed title, reachable through the scorer + first author
    for i in range(n_case3):
        title, words, authors, record = base_preprint()
        changed = _planted_changed_title(gen, words, hard=i % 2 == 0)
        planted = PublicationRecord(
            source=Source.crossref,
            title=changed,
            authors=tuple(_as_pub_author(gen.rng, a) for a in authors),
            venue_name="Annals of Synthetic Evidence",
            venue_type=VenueType.journal if i % 2 == 0 else VenueType.conference,
            published_date=gen.later_date(record.latest.created),
        )
        families = {a.split()[-1].lower() for a in authors}
        candidates = [planted] + [
            _distractor(gen, title, families) for _ in range(gen.rng.randint(2, 5))
        ]
        gen.rng.shuffle(candidates)
        corpus.fixtures[normalize_title(title).text] = candidates
        corpus.preprints.append(record)
        corpus.truth[record.arxiv_id] = MatchCase.case3_semantic
        corpus.planted_titles[record.arxiv_id] = planted.title

    # unpublished: only distractor candidates, nothing qualifies
    for i in range(n_unpublished):
        title, _, authors, record = base_preprint()
        families = {a.split()[-1].lower() for a in authors}
        corpus.fixtures[normalize_title(title).text] = [
            _distractor(gen, title, families) for _ in range(gen.rng.randint(0, 3))
        ]
        corpus.preprints.append(record)
        corpus.truth[record.arxiv_id] = MatchCase.none

    # a few unrelated index records to exercise token-candidate recall
    for _ in range(20):
        corpus.publications.append(
            PublicationRecord(
                source=Source.dblp,
                title=" ".join(gen.title_words()),
                authors=tuple(gen.authors(set())),
                venue_name="Archive of Background Material",
                venue_type=VenueType.conference,
                published_date=PartialDate(gen.rng.randint(2008, 2019)),
            )
        )
    return corpus


def write_corpus(corpus: SyntheticCorpus, directory) -> dict[str, Path]:
    """Write the corpus in the pipeline's on-disk formats.

    Produces ``preprints.jsonl``, ``publications.jsonl`` and a Crossref
    fixture directory; returns the paths.
    """
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    fixture_dir = out / "crossref_fixtures"
    fixture_dir.mkdir(exist_ok=True)
    write_preprints(corpus.preprints, out / "preprints.jsonl")
    write_publications(corpus.publications, out / "publications.jsonl")
    for query, records in corpus.fixtures.items():
        write_fixture(fixture_dir, query, records)
    return {
        "preprints": out / "preprints.jsonl",
        "publications": out / "publications.jsonl",
        "fixtures": fixture_dir,
    }
