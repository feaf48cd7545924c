"""Remote scholarly-API backend.

Wire contract (all endpoints GET, JSON bodies):

  /paper/search        params query, limit, sort=relevance|citationCount,
                       yearMax (optional)
                       -> {"data": [{"paperId","title","abstract",
                           "citationCount","year"}], "truncated": bool}
  /snippet/search      params query, limit, paperId (optional)
                       -> {"data": [{"paperId","title","section","ordinal",
                           "text"}], "fullTextAvailable": bool,
                           "truncated": bool}
                       404 when paperId is unknown
  /paper/{id}          params fields=all
                       -> {"paperId","title","abstract","citationCount",
                           "year","snippets":[...],"references":[...]}
  /paper/{id}/references -> {"data": [{"paperId","title"}]}

Status 404 maps to UnknownPaper. 429 and 5xx are retried with exponential
backoff (3 attempts) behind a 1 request/sec token bucket, then surface as
BackendUnavailable. Relevance ordering is delegated to the API (scores are
rank-derived); citation ordering is re-sorted client-side to enforce the
documented tie rule. Exclusion filters are applied client-side, with
over-fetch to keep pages full.

Configuration comes from environment variables CITESCOUT_API_BASE and
CITESCOUT_API_KEY. Recorded fixtures replay through RecordedTransport.
"""
from __future__ import annotations

import json
import os
import threading
import time
from pathlib import Path
from typing import Protocol

import requests

from ..errors import BackendUnavailable, EmptyQuery, FullTextUnavailable, UnknownPaper
from .text import context_window, render_full_text
from .types import (
    MODE_CITATION_COUNT,
    MODE_IN_PAPER,
    MODE_RELEVANCE,
    MODE_SNIPPET,
    PaperRecord,
    Query,
    SearchHit,
    SearchResultSet,
    Snippet,
)

BASE_URL_ENV = "CITESCOUT_API_BASE"
API_KEY_ENV = "CITESCOUT_API_KEY"


class Transport(Protocol):
    def request(self, path: str, params: dict) -> tuple[int, dict]: ...


class RateLimiter:
    """Token bucket; serializes callers to at most `per_second` requests."""

    def __init__(self, per_second: float = 1.0):
        self._interval = 1.0 / per_second if per_second > 0 else 0.0
        self._lock = threading.Lock()
        self._next_at = 0.0

    def acquire(self) -> None:
        with self._lock:
            now = time.monotonic()
            wait = self._next_at - now
            if wait > 0:
                time.sleep(wait)
                now = time.monotonic()
            self._next_at = now + self._interval


class HttpTransport:
    """requests-backed transport with retry/backoff and rate limiting."""

    RETRYABLE = {429, 500, 502, 503, 504}

    def __init__(
        self,
        base_url: str | None = None,
        api_key: str | None = None,
        per_second: float = 1.0,
        retries: int = 3,
        backoff: float = 0.5,
    ):
        base_url = base_url or os.environ.get(BASE_URL_ENV)
        if not base_url:
            raise BackendUnavailable(f"{BASE_URL_ENV} is not set")
        self.base_url = base_url.rstrip("/")
        self.retries = retries
        self.backoff = backoff
        self.limiter = RateLimiter(per_second)
        self.session = requests.Session()
        api_key = api_key or os.environ.get(API_KEY_ENV)
        if api_key:
            self.session.headers["x-api-key"] = api_key

    def request(self, path: str, params: dict) -> tuple[int, dict]:
        url = f"{self.base_url}{path}"
        last_error: str = "unreachable"
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            self.limiter.acquire()
            try:
                response = self.session.get(url, params=params, timeout=30)
            except requests.RequestException as exc:
                last_error = str(exc)
                continue
            if response.status_code in self.RETRYABLE:
                last_error = f"HTTP {response.status_code}"
                continue
            try:
                body = response.json() if response.content else {}
            except ValueError:
                body = {}
            return response.status_code, body
        raise BackendUnavailable(f"{url}: {last_error} after {self.retries} retries")


class RecordedTransport:
    """Replays recorded exchanges; lookups are keyed on (path, params)."""

    def __init__(self, exchanges: list[dict]):
        self._responses: dict[str, tuple[int, dict]] = {}
        for exchange in exchanges:
            key = self._key(exchange["path"], exchange.get("params", {}))
            self._responses[key] = (exchange.get("status", 200), exchange["body"])

    @classmethod
    def from_file(cls, path: str | Path) -> "RecordedTransport":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh)["exchanges"])

    @staticmethod
    def _key(path: str, params: dict) -> str:
        return path + "?" + json.dumps(params, sort_keys=True)

    def request(self, path: str, params: dict) -> tuple[int, dict]:
        key = self._key(path, params)
        if key not in self._responses:
            raise LookupError(f"no recorded exchange for {key}")
        return self._responses[key]


class RemoteCorpus:
    """Remote backend satisfying the same contracts as LocalCorpus."""

    def __init__(self, transport: Transport | None = None, page_overfetch: int = 20):
        self.transport = transport or HttpTransport()
        self.page_overfetch = page_overfetch

    # -- search operations --------------------------------------------------

    def search_relevance(self, q: Query, limit: int = 10) -> SearchResultSet:
        rows, truncated = self._paper_search(q, limit, sort="relevance")
        hits = [
            self._paper_hit(row, score=float(len(rows) - i))
            for i, row in enumerate(rows[:limit])
        ]
        return SearchResultSet(q.text, MODE_RELEVANCE, hits, truncated)

    def search_citation_count(self, q: Query, limit: int = 10) -> SearchResultSet:
        rows, truncated = self._paper_search(q, limit, sort="citationCount")
        rows.sort(key=lambda row: (-int(row.get("citationCount", 0)), row["paperId"]))
        hits = [
            self._paper_hit(row, score=float(row.get("citationCount", 0)))
            for row in rows[:limit]
        ]
        return SearchResultSet(q.text, MODE_CITATION_COUNT, hits, truncated)

    def find_in_text(self, paper_id: str, q: Query, limit: int = 10) -> SearchResultSet:
        self._check_query(q)
        status, body = self.transport.request(
            "/snippet/search",
            {"query": q.text, "limit": limit, "paperId": paper_id},
        )
        if status == 404:
            raise UnknownPaper(f"unknown paper_id {paper_id!r}")
        self._check_status(status, "/snippet/search")
        if not body.get("fullTextAvailable", True):
            raise FullTextUnavailable(f"no full text stored for {paper_id}")
        rows = body.get("data", [])
        hits = [
            self._snippet_hit(row, score=float(len(rows) - i))
            for i, row in enumerate(rows[:limit])
        ]
        return SearchResultSet(
            q.text, MODE_IN_PAPER, hits, bool(body.get("truncated"))
        )

    def search_text_snippet(self, q: Query, limit: int = 10) -> SearchResultSet:
        self._check_query(q)
        fetch = limit + (self.page_overfetch if q.excluded_paper_ids else 0)
        status, body = self.transport.request(
            "/snippet/search", {"query": q.text, "limit": fetch}
        )
        self._check_status(status, "/snippet/search")
        rows = [
            row
            for row in body.get("data", [])
            if row.get("paperId") not in q.excluded_paper_ids
        ]
        hits = [
            self._snippet_hit(row, score=float(len(rows) - i))
            for i, row in enumerate(rows[:limit])
        ]
        return SearchResultSet(q.text, MODE_SNIPPET, hits, bool(body.get("truncated")))

    def get_context(
        self, excerpt_text: str, source_paper_id: str, radius: int = 3
    ) -> list[Snippet]:
        paper = self.get_paper(source_paper_id)
        return context_window(paper.snippets, excerpt_text, radius)

    def read_full(self, paper_id: str) -> str:
        paper = self.get_paper(paper_id)
        if not paper.full_text_available:
            raise FullTextUnavailable(f"no full text stored for {paper_id}")
        return render_full_text(paper)

    def get_references(self, paper_id: str) -> list[tuple[str, str]]:
        status, body = self.transport.request(f"/paper/{paper_id}/references", {})
        if status == 404:
            raise UnknownPaper(f"unknown paper_id {paper_id!r}")
        self._check_status(status, "/paper/references")
        return [(row["paperId"], row.get("title", "")) for row in body.get("data", [])]

    def get_paper(self, paper_id: str) -> PaperRecord:
        status, body = self.transport.request(
            f"/paper/{paper_id}", {"fields": "all"}
        )
        if status == 404:
            raise UnknownPaper(f"unknown paper_id {paper_id!r}")
        self._check_status(status, "/paper")
        snippets = [
            Snippet(
                paper_id=body["paperId"],
                ordinal=row["ordinal"],
                section=row.get("section"),
                text=row["text"],
            )
            for row in sorted(body.get("snippets", []), key=lambda r: r["ordinal"])
        ]
        return PaperRecord(
            paper_id=body["paperId"],
            title=body.get("title", ""),
            abstract=body.get("abstract", "") or "",
            citation_count=int(body.get("citationCount", 0)),
            year=body.get("year"),
            snippets=snippets,
            references=[
                (row["paperId"], row.get("title", ""))
                for row in body.get("references", [])
            ],
        )

    # -- internals -----------------------------------------------------------

    def _paper_search(self, q: Query, limit: int, sort: str) -> tuple[list[dict], bool]:
        self._check_query(q)
        fetch = limit + (self.page_overfetch if q.excluded_paper_ids else 0)
        params = {"query": q.text, "limit": fetch, "sort": sort}
        if q.year_cutoff is not None:
            params["yearMax"] = q.year_cutoff
        status, body = self.transport.request("/paper/search", params)
        self._check_status(status, "/paper/search")
        rows = []
        for row in body.get("data", []):
            if row.get("paperId") in q.excluded_paper_ids:
                continue
            year = row.get("year")
            if q.year_cutoff is not None and year is not None and year > q.year_cutoff:
                continue
            rows.append(row)
        return rows, bool(body.get("truncated"))

    @staticmethod
    def _check_query(q: Query) -> None:
        if not q.text.strip():
            raise EmptyQuery("query text is empty")

    @staticmethod
    def _check_status(status: int, endpoint: str) -> None:
        if status != 200:
            raise BackendUnavailable(f"{endpoint} returned HTTP {status}")

    @staticmethod
    def _paper_hit(row: dict, score: float) -> SearchHit:
        return SearchHit(
            paper_id=row["paperId"],
            title=row.get("title", ""),
            text=row.get("abstract", "") or "",
            score=score,
            citation_count=int(row.get("citationCount", 0)),
            year=row.get("year"),
        )

    @staticmethod
    def _snippet_hit(row: dict, score: float) -> SearchHit:
        return SearchHit(
            paper_id=row["paperId"],
            title=row.get("title", ""),
            text=row.get("text", ""),
            score=score,
            section=row.get("section"),
            ordinal=row.get("ordinal"),
        )
