import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

import pytest

from corpusqual.biblio import biblio_indicators
from corpusqual.enrich import (
    ENDPOINT_ENV,
    EnrichConfig,
    FetchError,
    MetadataClient,
    RateLimiter,
    cache_key,
    enrich_from_metadata_service,
    parse_response,
)

from conftest import make_record

PAYLOADS = {
    "10.1/known": {
        "doi": "10.1/known",
        "authors": [{"author_id": "A", "country": "DE"}, {"author_id": "B", "country": None}],
        "references": [{"work_id": "r1", "author_ids": ["A"]}, {"work_id": "r2", "author_ids": []}],
        "citations": [{"work_id": "c1", "author_ids": ["Z"], "year": 2019},
                      {"work_id": "c2", "author_ids": ["A"], "year": 2023}],
    },
    "10.1/partial": {"citations": []},
    "10.1/badshape": {"authors": [{"name": "no id"}]},
}


class Handler(BaseHTTPRequestHandler):
    hits: dict = {}

    def do_GET(self):
        doi = parse_qs(urlparse(self.path).query).get("doi", [""])[0]
        Handler.hits[doi] = Handler.hits.get(doi, 0) + 1
        if doi == "10.1/flaky" and Handler.hits[doi] < 3:
            return self._send(503, b"busy")
        if doi == "10.1/flaky":
            return self._send(200, json.dumps({"citations": []}).encode())
        if doi == "10.1/down":
            return self._send(500, b"")
        if doi == "10.1/notjson":
            return self._send(200, b"<html>")
        if doi in PAYLOADS:
            return self._send(200, json.dumps(PAYLOADS[doi]).encode())
        self._send(404, b"{}")

    def _send(self, code, body):
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture
def server():
    Handler.hits = {}
    srv = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{srv.server_address[1]}/works"
    srv.shutdown()
    srv.server_close()


def cfg(endpoint, tmp_path, **kw):
    base = dict(endpoint=endpoint, cache_dir=tmp_path / "cache", requests_per_second=1000,
                backoff_seconds=0.001, max_retries=3, workers=2)
    base.update(kw)
    return EnrichConfig(**base)


def test_fixture_server_two_citations(server, tmp_path):
    rec = make_record(doi="10.1/known", pub_year=2018)
    [out], report = enrich_from_metadata_service([rec], cfg(server, tmp_path))
    assert report.enriched == ["a1"] and report.network_calls == 1
    ind = biblio_indicators(out)
    assert ind.n_citations_total == 2 and ind.n_citations_3yr == 1
    assert ind.pct_self_references == 50.0 and ind.n_countries == 1
    assert out.title == rec.title


def test_cache_hit_makes_no_network_calls(server, tmp_path):
    rec = make_record(doi="10.1/KNOWN")
    first, r1 = enrich_from_metadata_service([rec], cfg(server, tmp_path))
    second, r2 = enrich_from_metadata_service([rec], cfg(server, tmp_path, offline=True))
    assert r2.network_calls == 0 and r2.cache_hits == 1
    assert first == second
    third, r3 = enrich_from_metadata_service([rec], cfg("http://127.0.0.1:9/unused", tmp_path))
    assert third == first and r3.network_calls == 0
    assert (tmp_path / "cache" / f"{cache_key('10.1/known')}.json").exists()


def test_unknown_doi_and_missing_doi_are_unmatched(server, tmp_path):
    recs = [make_record("1", doi="10.1/nobody"), make_record("2", doi=None)]
    out, report = enrich_from_metadata_service(recs, cfg(server, tmp_path))
    assert report.unmatched == ["1", "2"] and out == recs
    # 404s are cached as well
    _, again = enrich_from_metadata_service(recs[:1], cfg(server, tmp_path, offline=True))
    assert again.unmatched == ["1"] and again.network_calls == 0


def test_errors_are_per_record(server, tmp_path):
    recs = [make_record("1", doi="10.1/notjson"), make_record("2", doi="10.1/down"),
            make_record("3", doi="10.1/badshape"), make_record("4", doi="10.1/known")]
    out, report = enrich_from_metadata_service(recs, cfg(server, tmp_path, max_retries=1))
    assert set(report.errors) == {"1", "2", "3"} and report.enriched == ["4"]
    assert "malformed" in report.errors["1"] and "HTTP 500" in report.errors["2"]
    assert [r.id for r in out] == ["1", "2", "3", "4"]
    assert report.match_rate == 0.25
    assert Handler.hits["10.1/down"] == 2


def test_retry_then_success(server, tmp_path):
    _, report = enrich_from_metadata_service([make_record(doi="10.1/flaky")], cfg(server, tmp_path))
    assert report.enriched == ["a1"] and report.network_calls == 3


def test_partial_payload_keeps_other_fields(server, tmp_path, full_record):
    rec = make_record(doi="10.1/partial", authors=full_record.authors, citations=full_record.citations)
    [out], _ = enrich_from_metadata_service([rec], cfg(server, tmp_path))
    assert out.authors == rec.authors and out.citations == ()


def test_offline_cold_cache(tmp_path):
    recs = [make_record("1", doi="10.1/known"), make_record("2", doi="10.1/x")]
    out, report = enrich_from_metadata_service(recs, cfg(None, tmp_path, offline=True))
    assert set(report.errors) == {"1", "2"} and report.network_calls == 0 and out == recs


def test_endpoint_from_environment(server, tmp_path, monkeypatch):
    monkeypatch.setenv(ENDPOINT_ENV, server)
    _, report = enrich_from_metadata_service([make_record(doi="10.1/known")], cfg(None, tmp_path))
    assert report.enriched == ["a1"]
    monkeypatch.delenv(ENDPOINT_ENV)
    client = MetadataClient(cfg(None, tmp_path / "other"))
    with pytest.raises(FetchError):
        client.fetch("10.1/known")


def test_parse_response_validation():
    assert parse_response({}) == {}
    with pytest.raises(FetchError):
        parse_response([1])
    with pytest.raises(FetchError):
        parse_response({"citations": [{"work_id": "x", "year": "soon"}]})


def test_rate_limiter_spacing():
    import time

    lim = RateLimiter(200.0)
    t0 = time.monotonic()
    for _ in range(11):
        lim.wait()
    assert time.monotonic() - t0 >= 10 / 200.0 * 0.9
