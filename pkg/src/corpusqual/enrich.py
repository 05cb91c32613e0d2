"""Optional DOI-keyed metadata enrichment with an on-disk response cache.

The service is queried as ``GET {endpoint}?doi=<doi>`` and must answer with
JSON in the corpus record layout::

    {"doi": "...",
     "authors":    [{"author_id": "...", "country": "DE"}],
     "references": [{"work_id": "...", "author_ids": ["..."]}],
     "citations":  [{"work_id": "...", "author_ids": ["..."], "year": 2021}]}

Any of the three lists may be omitted, in which case the record keeps its
existing value.  HTTP 404 means the DOI is unknown to the service.  Responses
(including 404s) are cached as one JSON file per DOI hash; offline mode reads
only the cache.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import requests

from .model import ArticleRecord, AuthorRef, CitingWork, WorkRef

logger = logging.getLogger(__name__)

ENDPOINT_ENV = "CORPUSQUAL_ENDPOINT"


class FetchError(RuntimeError):
    pass


@dataclass
class EnrichConfig:
    endpoint: Optional[str] = None
    cache_dir: Path = Path(".corpusqual_cache")
    offline: bool = False
    requests_per_second: float = 10.0
    max_retries: int = 3
    backoff_seconds: float = 0.5
    timeout: float = 15.0
    workers: int = 4

    def resolved_endpoint(self) -> Optional[str]:
        return self.endpoint or os.environ.get(ENDPOINT_ENV)


@dataclass
class FetchReport:
    enriched: list[str] = field(default_factory=list)
    unmatched: list[str] = field(default_factory=list)
    errors: dict[str, str] = field(default_factory=dict)
    network_calls: int = 0
    cache_hits: int = 0

    @property
    def match_rate(self) -> Optional[float]:
        total = len(self.enriched) + len(self.unmatched) + len(self.errors)
        return len(self.enriched) / total if total else None


class RateLimiter:
    """Spaces calls at least ``1 / rate`` seconds apart across threads."""

    def __init__(self, rate: float):
        self.interval = 1.0 / rate if rate > 0 else 0.0
        self._lock = threading.Lock()
        self._next = 0.0

    def wait(self) -> None:
        with self._lock:
            now = time.monotonic()
            delay = self._next - now
            self._next = max(now, self._next) + self.interval
        if delay > 0:
            time.sleep(delay)


def cache_key(doi: str) -> str:
    return hashlib.sha256(doi.strip().lower().encode("utf-8")).hexdigest()


class MetadataClient:
    def __init__(self, config: EnrichConfig, session: Optional[requests.Session] = None):
        self.config = config
        self.session = session or requests.Session()
        self.limiter = RateLimiter(config.requests_per_second)
        self._write_lock = threading.Lock()
        self._count_lock = threading.Lock()
        self.network_calls = 0
        self.cache_hits = 0
        Path(config.cache_dir).mkdir(parents=True, exist_ok=True)

    def _cache_path(self, doi: str) -> Path:
        return Path(self.config.cache_dir) / f"{cache_key(doi)}.json"

    def _read_cache(self, doi: str) -> Optional[dict]:
        path = self._cache_path(doi)
        if not path.exists():
            return None
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            logger.warning("ignoring unreadable cache entry %s", path)
            return None

    def _write_cache(self, doi: str, entry: dict) -> None:
        path = self._cache_path(doi)
        tmp = path.with_suffix(".tmp")
        with self._write_lock:
            tmp.write_text(json.dumps(entry, sort_keys=True), encoding="utf-8")
            tmp.replace(path)

    def _get(self, doi: str) -> requests.Response:
        endpoint = self.config.resolved_endpoint()
        if not endpoint:
            raise FetchError("no endpoint configured")
        last = None
        for attempt in range(self.config.max_retries + 1):
            if attempt:
                time.sleep(self.config.backoff_seconds * 2 ** (attempt - 1))
            self.limiter.wait()
            with self._count_lock:
                self.network_calls += 1
            try:
                resp = self.session.get(endpoint, params={"doi": doi}, timeout=self.config.timeout)
            except requests.RequestException as exc:
                last = f"network error: {exc}"
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last = f"HTTP {resp.status_code}"
                continue
            return resp
        raise FetchError(last or "request failed")

    def fetch(self, doi: str) -> Optional[dict]:
        """Metadata for ``doi``, or ``None`` when the service does not know it."""
        entry = self._read_cache(doi)
        if entry is not None:
            with self._count_lock:
                self.cache_hits += 1
            return entry.get("data")
        if self.config.offline:
            raise FetchError("offline and not cached")
        resp = self._get(doi)
        if resp.status_code == 404:
            self._write_cache(doi, {"doi": doi, "data": None})
            return None
        if resp.status_code != 200:
            raise FetchError(f"HTTP {resp.status_code}")
        try:
            data = resp.json()
        except ValueError as exc:
            raise FetchError(f"malformed response: {exc}") from exc
        parse_response(data)  # validate before caching
        self._write_cache(doi, {"doi": doi, "data": data})
        return data


def parse_response(data) -> dict:
    """Map a service response onto record fields; raises FetchError if malformed."""
    if not isinstance(data, dict):
        raise FetchError("malformed response: not an object")
    out = {}
    try:
        if "authors" in data:
            out["authors"] = tuple(
                AuthorRef(str(a["author_id"]), a.get("country") or None) for a in data["authors"]
            )
        if "references" in data:
            out["references"] = tuple(
                WorkRef(str(r["work_id"]), tuple(map(str, r.get("author_ids") or ())))
                for r in data["references"]
            )
        if "citations" in data:
            out["citations"] = tuple(
                CitingWork(str(c["work_id"]), tuple(map(str, c.get("author_ids") or ())), int(c["year"]))
                for c in data["citations"]
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise FetchError(f"malformed response: {exc!r}") from exc
    return out


def enrich_from_metadata_service(
    records: Sequence[ArticleRecord],
    config: EnrichConfig,
    session: Optional[requests.Session] = None,
) -> tuple[list[ArticleRecord], FetchReport]:
    """Fill authors/references/citations of records matched by DOI.

    Fetch failures are recorded per record and never abort the run; output
    order matches input order.
    """
    client = MetadataClient(config, session)
    report = FetchReport()

    def work(rec: ArticleRecord):
        if not rec.doi:
            return rec, "unmatched", None
        try:
            data = client.fetch(rec.doi)
            if data is None:
                return rec, "unmatched", None
            return dataclasses.replace(rec, **parse_response(data)), "enriched", None
        except FetchError as exc:
            return rec, "error", str(exc)

    with ThreadPoolExecutor(max_workers=max(1, config.workers)) as pool:
        results = list(pool.map(work, records))

    out = []
    for rec, outcome, err in results:
        out.append(rec)
        if outcome == "enriched":
            report.enriched.append(rec.id)
        elif outcome == "unmatched":
            report.unmatched.append(rec.id)
        else:
            report.errors[rec.id] = err
            logger.warning("enrichment failed for %s: %s", rec.id, err)
    report.network_calls = client.network_calls
    report.cache_hits = client.cache_hits
    return out, report
