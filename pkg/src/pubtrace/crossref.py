"""Candidate retrieval by title query against Crossref, fixture-first.

The client defaults to fixture mode: responses live in a directory with
one JSON file per normalized query, named by the hex digest of the
normalized query string. Live HTTP mode is opt-in, serializes its calls,
retries with bounded exponential backoff, and writes every response into
the same directory layout, so a completed run can be replayed without any
network access.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from pathlib import Path
from typing import Iterable

from .errors import BackendUnavailable, FixtureMiss
from .ingest import publication_from_json, publication_to_json
from .normalize import normalize_title
from .records import PartialDate, PublicationRecord, Source, VenueType

logger = logging.getLogger(__name__)

CROSSREF_API = "https://api.crossref.org/works"

_CROSSREF_VENUE_TYPE = {
    "journal-article": VenueType.journal,
    "proceedings-article": VenueType.conference,
    "book-chapter": VenueType.book_chapter,
}


def query_digest(query: str) -> str:
    """Filename stem for a normalized query string."""
    return hashlib.sha256(query.encode("utf-8")).hexdigest()


def _record_from_crossref_item(item: dict) -> PublicationRecord | None:
    titles = item.get("title") or []
    if not titles or not str(titles[0]).strip():
        return None
    authors = []
    for a in item.get("author", []):
        family = (a.get("family") or "").strip()
        given = (a.get("given") or "").strip()
        name = f"{given} {family}".strip()
        if name:
            authors.append(name)
    date = None
    for field in ("published-print", "published-online", "issued"):
        parts = (item.get(field) or {}).get("date-parts") or []
        if parts and parts[0] and parts[0][0]:
            date = PartialDate(*[int(p) for p in parts[0][:3]])
            break
    container = item.get("container-title") or []
    return PublicationRecord(
        source=Source.crossref,
        title=str(titles[0]),
        authors=tuple(authors),
        venue_name=str(container[0]) if container else None,
        venue_type=_CROSSREF_VENUE_TYPE.get(item.get("type"), VenueType.other)
        if item.get("type")
        else VenueType.unknown,
        published_date=date,
        doi=item.get("DOI"),
    )


class CrossrefClient:
    """Title-query candidate backend with on-disk caching.

    ``fixture_dir`` is both the fixture store and the live-mode cache; the
    two modes share one file format (a JSON array of canonical publication
    objects). Reads are safe from concurrent threads; writes go through a
    temp-file rename and a lock serializes all network calls.
    """

    def __init__(
        self,
        fixture_dir: str | os.PathLike,
        *,
        live: bool = False,
        delay: float = 1.0,
        max_retries: int = 3,
        timeout: float = 30.0,
        user_agent: str = "pubtrace/0.1 (mailto:ops@example.org)",
        session=None,
    ):
        self.fixture_dir = Path(fixture_dir)
        self.live = live
        self.delay = delay
        self.max_retries = max_retries
        self.timeout = timeout
        self.user_agent = user_agent
        self._session = session
        self._lock = threading.Lock()
        self._last_request = 0.0
        if live:
            self.fixture_dir.mkdir(parents=True, exist_ok=True)

    def fetch(self, title_query: str, limit: int) -> list[PublicationRecord]:
        """Return at most ``limit`` candidate records, in backend order."""
        if limit < 1:
            raise ValueError("limit must be >= 1")
        query = normalize_title(title_query).text
        cached = self._read_cached(query)
        if cached is not None:
            return cached[:limit]
        if not self.live:
            raise FixtureMiss(query)
        records = self._fetch_live(query)
        self._write_cached(query, records)
        return records[:limit]

    # -- cache layer --------------------------------------------------------

    def _cache_path(self, query: str) -> Path:
        return self.fixture_dir / f"{query_digest(query)}.json"

    def _read_cached(self, query: str) -> list[PublicationRecord] | None:
        path = self._cache_path(query)
        if not path.exists():
            return None
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        return [publication_from_json(obj) for obj in data]

    def _write_cached(self, query: str, records: Iterable[PublicationRecord]) -> None:
        path = self._cache_path(query)
        tmp = path.with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            json.dump([publication_to_json(r) for r in records], fh, sort_keys=True, indent=1)
        os.replace(tmp, path)

    # -- live layer ---------------------------------------------------------

    def _fetch_live(self, query: str) -> list[PublicationRecord]:
        if self._session is None:
            import requests

            self._session = requests.Session()
        params = {"query.title": query, "rows": 20}
        headers = {"User-Agent": self.user_agent}
        with self._lock:  # at most one request in flight
            wait = self.delay
            for attempt in range(self.max_retries + 1):
                since = time.monotonic() - self._last_request
                if since < self.delay:
                    time.sleep(self.delay - since)
                try:
                    self._last_request = time.monotonic()
                    resp = self._session.get(
                        CROSSREF_API, params=params, headers=headers, timeout=self.timeout
                    )
                    if resp.status_code == 200:
                        items = resp.json().get("message", {}).get("items", [])
                        records = [_record_from_crossref_item(i) for i in items]
                        return [r for r in records if r is not None]
                    retryable = resp.status_code == 429 or resp.status_code >= 500
                    if not retryable:
                        raise BackendUnavailable(f"crossref returned HTTP {resp.status_code}")
                    logger.warning("crossref HTTP %d, retrying", resp.status_code)
                except BackendUnavailable:
                    raise
                except Exception as exc:
                    logger.warning("crossref request failed: %s", exc)
                if attempt < self.max_retries:
                    time.sleep(wait)
                    wait = min(wait * 2, 30.0)
        raise BackendUnavailable(f"crossref unreachable after {self.max_retries + 1} attempts")


def write_fixture(fixture_dir, title_query: str, records: Iterable[PublicationRecord]) -> Path:
    """Store a fixture response for a title query; returns the file path."""
    client = CrossrefClient(fixture_dir)
    client.fixture_dir.mkdir(parents=True, exist_ok=True)
    query = normalize_title(title_query).text
    client._write_cached(query, records)
    return client._cache_path(query)


def fetch_crossref_candidates(
    title_query: str, limit: int, client: CrossrefClient
) -> list[PublicationRecord]:
    """Contract-named wrapper around :meth:`CrossrefClient.fetch`."""
    return client.fetch(title_query, limit)
