"""Title-pair dataset construction with anti-leakage splits.

Positive samples come from version histories: every unordered pair of
distinct normalized titles of one preprint. Negative samples come from
title-query retrieval: the top ten results for the latest title, minus
every result sharing an author with the query. Train/dev/test are split
so that no source preprint and no normalized title pair crosses
partitions.
"""

from __future__ import annotations

import datetime as _dt
import json
import logging
import random
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .crossref import CrossrefClient
from .errors import BackendError, BackendUnavailable, InsufficientSamples
from .ingest import select_sample
from .normalize import author_overlap, normalize_title
from .records import PreprintRecord

logger = logging.getLogger(__name__)

NEGATIVE_QUERY_LIMIT = 10
PARTITIONS = ("train", "dev", "test")


class Provenance(str, Enum):
    version_history_positive = "version_history_positive"
    crossref_negative = "crossref_negative"


@dataclass(frozen=True)
class TitlePairSample:
    """One (title, title) training instance.

    Stored in canonical order (lexicographically smaller title first);
    ``swapped`` is set when the original orientation was reversed.
    """

    title_a: str
    title_b: str
    authors_a: tuple[str, ...]
    authors_b: tuple[str, ...]
    label: bool
    provenance: Provenance
    source_arxiv_id: str
    swapped: bool = False

    def __post_init__(self):
        if self.label != (self.provenance is Provenance.version_history_positive):
            raise ValueError("label must mirror provenance")
        if self.label:
            na = normalize_title(self.title_a).text
            nb = normalize_title(self.title_b).text
            if na == nb:
                raise ValueError("positive pair titles must differ after normalization")

    @property
    def normalized_pair(self) -> tuple[str, str]:
        na = normalize_title(self.title_a).text
        nb = normalize_title(self.title_b).text
        return (na, nb) if na <= nb else (nb, na)


def make_sample(
    title_a: str,
    title_b: str,
    authors_a: Sequence[str],
    authors_b: Sequence[str],
    label: bool,
    provenance: Provenance,
    source_arxiv_id: str,
) -> TitlePairSample:
    """Build a sample, canonicalizing the title order."""
    swapped = title_b < title_a
    if swapped:
        title_a, title_b = title_b, title_a
        authors_a, authors_b = authors_b, authors_a
    return TitlePairSample(
        title_a=title_a,
        title_b=title_b,
        authors_a=tuple(authors_a),
        authors_b=tuple(authors_b),
        label=label,
        provenance=provenance,
        source_arxiv_id=source_arxiv_id,
        swapped=swapped,
    )


def positive_pairs(preprint: PreprintRecord) -> list[TitlePairSample]:
    """Every unordered pair of distinct normalized titles across versions.

    A preprint with k distinct titles yields k*(k-1)/2 positives; authors
    come from the first version that carried each title.
    """
    distinct: list[tuple[str, tuple[str, ...]]] = []
    seen: set[str] = set()
    for version in preprint.versions:
        key = normalize_title(version.title).text
        if key and key not in seen:
            seen.add(key)
            distinct.append((version.title, version.authors))
    out = []
    for i in range(len(distinct)):
        for j in range(i + 1, len(distinct)):
            title_i, authors_i = distinct[i]
            title_j, authors_j = distinct[j]
            out.append(
                make_sample(
                    title_i, title_j, authors_i, authors_j,
                    label=True,
                    provenance=Provenance.version_history_positive,
                    source_arxiv_id=preprint.arxiv_id,
                )
            )
    return out


def negative_pairs(preprint: PreprintRecord, backend: CrossrefClient) -> list[TitlePairSample]:
    """Top-ten retrieval for the latest title, author-overlapping results removed."""
    latest = preprint.latest
    results = backend.fetch(latest.title, NEGATIVE_QUERY_LIMIT)
    out = []
    for pub in results:
        if author_overlap(latest.authors, pub.authors):
            continue
        out.append(
            make_sample(
                latest.title, pub.title, latest.authors, pub.authors,
                label=False,
                provenance=Provenance.crossref_negative,
                source_arxiv_id=preprint.arxiv_id,
            )
        )
    return out


# ---------------------------------------------------------------------------
# Split construction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SplitSpec:
    """Membership rules and target sizes for the three partitions.

    The study sample (dev/test pool) is every preprint first submitted in
    the study range with a category under the prefix; the training pool is
    its complement, so the rules are disjoint by construction. Dev and
    test preprints are separated by a seeded shuffle of the study ids.
    """

    study_start: _dt.date = _dt.date(2008, 1, 1)
    study_end: _dt.date = _dt.date(2017, 12, 31)
    category_prefix: str = "cs."
    train_target: int = 40_000
    dev_target: int = 5_000
    test_target: int = 5_000
    seed: int = 0

    def target(self, partition: str) -> int:
        return {"train": self.train_target, "dev": self.dev_target, "test": self.test_target}[partition]


def _sample_to_json(sample: TitlePairSample) -> dict[str, Any]:
    return {
        "a": sample.title_a,
        "b": sample.title_b,
        "authors_a": list(sample.authors_a),
        "authors_b": list(sample.authors_b),
        "label": sample.label,
        "prov": sample.provenance.value,
        "src": sample.source_arxiv_id,
        "swapped": sample.swapped,
    }


def sample_from_json(obj: Mapping[str, Any]) -> TitlePairSample:
    return TitlePairSample(
        title_a=obj["a"],
        title_b=obj["b"],
        authors_a=tuple(obj.get("authors_a", ())),
        authors_b=tuple(obj.get("authors_b", ())),
        label=obj["label"],
        provenance=Provenance(obj["prov"]),
        source_arxiv_id=obj["src"],
        swapped=obj.get("swapped", False),
    )


def write_samples(samples: Iterable[TitlePairSample], path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sample in samples:
            fh.write(json.dumps(_sample_to_json(sample), sort_keys=True, ensure_ascii=False))
            fh.write("\n")
            n += 1
    return n


def load_samples(path) -> list[TitlePairSample]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(sample_from_json(json.loads(line)))
    return out


def _generate_for(
    preprints: Sequence[PreprintRecord],
    backend: CrossrefClient | None,
    skipped: list[str],
) -> list[TitlePairSample]:
    samples: list[TitlePairSample] = []
    failures = 0
    for preprint in preprints:
        samples.extend(positive_pairs(preprint))
        if backend is None:
            continue
        try:
            samples.extend(negative_pairs(preprint, backend))
        except BackendError as exc:
            failures += 1
            skipped.append(preprint.arxiv_id)
            logger.warning("negative mining skipped for %s: %s", preprint.arxiv_id, exc)
    if backend is not None and preprints and failures == len(preprints):
        raise BackendUnavailable("negative mining failed for every preprint; backend is down")
    return samples


def _stable_key(sample: TitlePairSample) -> tuple:
    return (sample.source_arxiv_id, sample.title_a, sample.title_b, sample.provenance.value)


def _subsample(
    samples: list[TitlePairSample], target: int, partition: str, rng: random.Random
) -> list[TitlePairSample]:
    """Seeded, provenance-stratified downsampling to exactly ``target``."""
    if len(samples) < target:
        raise InsufficientSamples(partition, len(samples), target)
    if len(samples) == target:
        return sorted(samples, key=_stable_key)
    by_prov: dict[Provenance, list[TitlePairSample]] = {}
    for s in samples:
        by_prov.setdefault(s.provenance, []).append(s)
    total = len(samples)
    chosen: list[TitlePairSample] = []
    provs = sorted(by_prov, key=lambda p: p.value)
    quotas = {p: int(target * len(by_prov[p]) / total) for p in provs}
    # distribute rounding remainder deterministically
    shortfall = target - sum(quotas.values())
    for p in provs:
        if shortfall == 0:
            break
        room = len(by_prov[p]) - quotas[p]
        take = min(room, shortfall)
        quotas[p] += take
        shortfall -= take
    for p in provs:
        pool = sorted(by_prov[p], key=_stable_key)
        rng.shuffle(pool)
        chosen.extend(pool[:quotas[p]])
    return sorted(chosen, key=_stable_key)


def build_dataset(
    corpus: Sequence[PreprintRecord],
    split: SplitSpec,
    backend: CrossrefClient | None,
    out_dir,
) -> dict[str, Any]:
    """Generate, split, downsample and write the three sample files.

    Returns the manifest (also written as ``manifest.json``): counts and
    class balance per partition, the seed, and any preprints whose
    negative mining failed.
    """
    out_path = Path(out_dir)
    out_path.mkdir(parents=True, exist_ok=True)
    rng = random.Random(split.seed)

    study_ids = {
        p.arxiv_id
        for p in select_sample(corpus, (split.study_start, split.study_end), split.category_prefix)
    }
    train_pool = [p for p in corpus if p.arxiv_id not in study_ids]
    study_pool = sorted(
        (p for p in corpus if p.arxiv_id in study_ids), key=lambda p: p.arxiv_id
    )
    rng.shuffle(study_pool)
    dev_total = split.dev_target + split.test_target
    n_dev_ids = (
        len(study_pool) // 2
        if dev_total == 0
        else round(len(study_pool) * split.dev_target / dev_total)
    )
    pools = {
        "train": train_pool,
        "dev": study_pool[:n_dev_ids],
        "test": study_pool[n_dev_ids:],
    }

    skipped: list[str] = []
    manifest: dict[str, Any] = {
        "seed": split.seed,
        "targets": {p: split.target(p) for p in PARTITIONS},
        "partitions": {},
    }
    for partition in PARTITIONS:
        samples = _generate_for(pools[partition], backend, skipped)
        samples = _subsample(samples, split.target(partition), partition, rng)
        write_samples(samples, out_path / f"{partition}.jsonl")
        n_pos = sum(1 for s in samples if s.label)
        manifest["partitions"][partition] = {
            "count": len(samples),
            "positives": n_pos,
            "negatives": len(samples) - n_pos,
            "positive_ratio": n_pos / len(samples) if samples else 0.0,
            "source_preprints": len({s.source_arxiv_id for s in samples}),
        }
    manifest["negative_mining_skipped"] = sorted(set(skipped))
    with open(out_path / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return manifest


def check_disjoint(files: Mapping[str, Any]) -> dict[str, Any]:
    """Verify partition hygiene: no shared source preprint, no identical
    normalized title pair across partitions. Violations are report content,
    not errors."""
    id_partitions: dict[str, set[str]] = {}
    pair_partitions: dict[tuple[str, str], set[str]] = {}
    for partition, path in files.items():
        for sample in load_samples(path):
            id_partitions.setdefault(sample.source_arxiv_id, set()).add(partition)
            pair_partitions.setdefault(sample.normalized_pair, set()).add(partition)
    violations: list[dict[str, Any]] = []
    for arxiv_id, partitions in sorted(id_partitions.items()):
        if len(partitions) > 1:
            violations.append(
                {"type": "shared_source_id", "value": arxiv_id, "partitions": sorted(partitions)}
            )
    for pair, partitions in sorted(pair_partitions.items()):
        if len(partitions) > 1:
            violations.append(
                {"type": "shared_pair", "value": list(pair), "partitions": sorted(partitions)}
            )
    return {"violations": violations, "disjoint": not violations}
