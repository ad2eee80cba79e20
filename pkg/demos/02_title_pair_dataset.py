"""Build a title-pair classification dataset from version histories.

Positives are pairs of distinct titles of the same preprint; negatives are
retrieval results with no shared author. The split keeps study-window
preprints out of the training partition, and a hygiene check confirms
nothing leaks across partitions.
"""

import json
import tempfile
from pathlib import Path

from pubtrace.crossref import CrossrefClient, write_fixture
from pubtrace.ingest import write_preprints
from pubtrace.pairgen import SplitSpec, build_dataset, check_disjoint, positive_pairs
from pubtrace.records import PartialDate, PreprintRecord, PublicationRecord, Source, VersionEntry

# A preprint whose four versions all carry different titles contributes
# C(4,2) = 6 positive pairs.
versions = []
titles = [
    "Fully Convolutional Network-based Multi-Task Learning for Rectum and Rectal Cancer Segmentation",
    "Multi-Task Learning with a Fully Convolutional Network for Rectum and Rectal Cancer Segmentation",
    "A Fully Convolutional Network for Rectal Cancer Segmentation",
    "Reducing the Model Variance of Rectal Cancer Segmentation Network",
]
for v, title in enumerate(titles, start=1):
    versions.append(VersionEntry(v, title, ("Joohyung Lee",), PartialDate(2019, 1, 20 + v)))
renamer = PreprintRecord("demo.0001", tuple(versions), ("cs.CV",))
print(f"{len(titles)} distinct titles -> {len(positive_pairs(renamer))} positive pairs")

# A tiny corpus for the full build: two old preprints feed the training
# partition, four study-window preprints feed dev and test.
corpus = []
for i in range(2):
    corpus.append(PreprintRecord(
        f"old.{i}",
        (
            VersionEntry(1, f"Archival finding {i} stated", ("Ann Author",), PartialDate(2005, 3, 1)),
            VersionEntry(2, f"Archival finding {i} restated", ("Ann Author",), PartialDate(2005, 9, 1)),
        ),
        ("cs.DS",),
    ))
for i in range(4):
    corpus.append(PreprintRecord(
        f"study.{i}",
        (
            VersionEntry(1, f"Windowed result {i} derived", ("Ben Writer",), PartialDate(2013, 5, 2)),
            VersionEntry(2, f"Windowed result {i} rederived", ("Ben Writer",), PartialDate(2014, 1, 2)),
        ),
        ("cs.LG",),
    ))

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    write_preprints(corpus, tmp / "preprints.jsonl")
    # fixture retrieval results for negative mining: no shared authors
    for preprint in corpus:
        write_fixture(tmp / "fixtures", preprint.versions[-1].title, [
            PublicationRecord(Source.crossref, f"Unrelated match for {preprint.arxiv_id}",
                              ("Zoe Remote",)),
        ])
    split = SplitSpec(train_target=4, dev_target=2, test_target=2, seed=5)
    manifest = build_dataset(corpus, split, CrossrefClient(tmp / "fixtures"), tmp / "dataset")

    print("\nmanifest:")
    print(json.dumps(manifest["partitions"], indent=2, sort_keys=True))

    report = check_disjoint({p: tmp / "dataset" / f"{p}.jsonl" for p in ("train", "dev", "test")})
    print(f"\npartitions disjoint: {report['disjoint']}")
