import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pubtrace.records import (
    PartialDate,
    PreprintRecord,
    PublicationRecord,
    Source,
    VenueType,
    VersionEntry,
)


def make_preprint(
    arxiv_id="p0001",
    titles=("A Study of Synthetic Things",),
    authors=("Alice Kim", "Bo Chen"),
    created="2015-03-01",
    categories=("cs.LG",),
    doi=None,
    journal_ref=None,
) -> PreprintRecord:
    """Build a preprint whose versions carry the given titles in order."""
    base = PartialDate.parse(created)
    versions = []
    for i, title in enumerate(titles, start=1):
        versions.append(
            VersionEntry(
                version_index=i,
                title=title,
                authors=tuple(authors),
                created=PartialDate(base.year, base.month, min(28, (base.day or 1) + i - 1)),
            )
        )
    return PreprintRecord(
        arxiv_id=arxiv_id,
        versions=tuple(versions),
        categories=tuple(categories),
        abstract="abstract",
        doi=doi,
        journal_ref=journal_ref,
    )


def make_publication(
    title="A Study of Synthetic Things",
    authors=("Alice Kim",),
    source=Source.dblp,
    venue_type=VenueType.journal,
    venue_name="Journal of Tests",
    published_date="2016-05",
    doi=None,
) -> PublicationRecord:
    return PublicationRecord(
        source=source,
        title=title,
        authors=tuple(authors),
        venue_name=venue_name,
        venue_type=venue_type,
        published_date=PartialDate.parse(published_date) if published_date else None,
        doi=doi,
    )


@pytest.fixture
def preprint():
    return make_preprint()
