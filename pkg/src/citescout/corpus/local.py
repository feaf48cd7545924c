"""Offline paper database backed by an in-memory inverted index.

Corpus file format: JSON-lines, one paper per line, UTF-8, LF endings:

    {"paper_id": ..., "title": ..., "abstract": ..., "year": ...,
     "citation_count": ..., "snippets": [{"ordinal", "section", "text"}],
     "references": [{"paper_id", "title"}]}

A record may carry "full_text" instead of "snippets"; it is segmented
deterministically (blank lines, then sentence regrouping at 512 tokens).

All search modes share one tie rule: equal keys are ordered by ascending
paper_id (snippet hits additionally by ascending ordinal). Snippet scoring
uses collection-wide statistics for both per-paper and corpus-wide search.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from ..errors import (
    DuplicateId,
    EmptyQuery,
    FullTextUnavailable,
    SchemaError,
    UnknownPaper,
)
from .text import (
    CollectionStats,
    bm25_score,
    context_window,
    render_full_text,
    segment_text,
    tokenize,
)
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

INDEX_FORMAT = "citescout-index-v1"


class _InvertedIndex:
    """Term postings over a keyed document collection."""

    def __init__(
        self,
        postings: dict[str, dict],
        doc_len: dict,
        doc_count: int,
        total_len: int,
    ):
        self.postings = postings
        self.doc_len = doc_len
        self.stats = CollectionStats(
            {term: len(entries) for term, entries in postings.items()},
            doc_count,
            total_len,
        )

    @classmethod
    def build(cls, docs: Iterable[tuple]) -> "_InvertedIndex":
        """docs: iterable of (key, text)."""
        postings: dict[str, dict] = {}
        doc_len: dict = {}
        total_len = 0
        count = 0
        for key, text in docs:
            tokens = tokenize(text)
            doc_len[key] = len(tokens)
            total_len += len(tokens)
            count += 1
            freqs: dict[str, int] = {}
            for token in tokens:
                freqs[token] = freqs.get(token, 0) + 1
            for token, tf in freqs.items():
                postings.setdefault(token, {})[key] = tf
        return cls(postings, doc_len, count, total_len)

    def candidates(self, query_tokens: list[str]) -> set:
        keys: set = set()
        for token in query_tokens:
            keys.update(self.postings.get(token, ()))
        return keys

    def score(self, query_tokens: list[str], key) -> float:
        term_freq = {
            token: self.postings.get(token, {}).get(key, 0) for token in query_tokens
        }
        return bm25_score(query_tokens, term_freq, self.doc_len[key], self.stats)


class LocalCorpus:
    """Deterministic local backend implementing the search primitives."""

    def __init__(self, records: list[PaperRecord]):
        self.papers: dict[str, PaperRecord] = {}
        for record in records:
            record.validate()
            if record.paper_id in self.papers:
                raise DuplicateId(f"duplicate paper_id {record.paper_id!r}")
            self.papers[record.paper_id] = record
        self._doc_index = _InvertedIndex.build(
            (pid, record.searchable_text) for pid, record in self.papers.items()
        )
        self._snippet_index = _InvertedIndex.build(
            ((record.paper_id, snippet.ordinal), snippet.text)
            for record in self.papers.values()
            for snippet in record.snippets
        )

    # -- construction ------------------------------------------------------

    @classmethod
    def from_jsonl(cls, path: str | Path) -> "LocalCorpus":
        return cls(load_corpus_jsonl(path))

    @classmethod
    def from_index_file(cls, path: str | Path) -> "LocalCorpus":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("format") != INDEX_FORMAT:
            raise SchemaError(f"not a {INDEX_FORMAT} file: {path}")
        records = [record_from_dict(row) for row in payload["papers"]]
        corpus = cls.__new__(cls)
        corpus.papers = {r.paper_id: r for r in records}
        corpus._doc_index = _index_from_payload(payload["doc_index"], snippet=False)
        corpus._snippet_index = _index_from_payload(
            payload["snippet_index"], snippet=True
        )
        return corpus

    # -- search operations --------------------------------------------------

    def search_relevance(self, q: Query, limit: int = 10) -> SearchResultSet:
        """Papers matching q in title/abstract, by descending BM25 score."""
        tokens = self._query_tokens(q)
        scored = []
        for pid in self._doc_index.candidates(tokens):
            if not q.admits(self.papers[pid]):
                continue
            score = self._doc_index.score(tokens, pid)
            if score > 0.0:
                scored.append((pid, score))
        scored.sort(key=lambda item: (-item[1], item[0]))
        hits = [self._paper_hit(pid, score) for pid, score in scored[:limit]]
        return SearchResultSet(q.text, MODE_RELEVANCE, hits, len(scored) > limit)

    def search_citation_count(self, q: Query, limit: int = 10) -> SearchResultSet:
        """Papers matching q in title/abstract, by descending citation count."""
        tokens = self._query_tokens(q)
        matched = []
        for pid in self._doc_index.candidates(tokens):
            paper = self.papers[pid]
            if q.admits(paper) and self._doc_index.score(tokens, pid) > 0.0:
                matched.append((pid, paper.citation_count))
        matched.sort(key=lambda item: (-item[1], item[0]))
        hits = [self._paper_hit(pid, float(count)) for pid, count in matched[:limit]]
        return SearchResultSet(q.text, MODE_CITATION_COUNT, hits, len(matched) > limit)

    def find_in_text(self, paper_id: str, q: Query, limit: int = 10) -> SearchResultSet:
        """Snippets of one paper matching q, by descending BM25 score."""
        paper = self.get_paper(paper_id)
        if not paper.full_text_available:
            raise FullTextUnavailable(f"no full text stored for {paper_id}")
        tokens = self._query_tokens(q)
        scored = []
        for snippet in paper.snippets:
            key = (paper_id, snippet.ordinal)
            score = self._snippet_index.score(tokens, key)
            if score > 0.0:
                scored.append((snippet, score))
        scored.sort(key=lambda item: (-item[1], item[0].ordinal))
        hits = [
            self._snippet_hit(paper, snippet, score)
            for snippet, score in scored[:limit]
        ]
        return SearchResultSet(q.text, MODE_IN_PAPER, hits, len(scored) > limit)

    def search_text_snippet(self, q: Query, limit: int = 10) -> SearchResultSet:
        """Snippets across all papers matching q, by descending BM25 score."""
        tokens = self._query_tokens(q)
        scored = []
        for key in self._snippet_index.candidates(tokens):
            pid, ordinal = key
            paper = self.papers[pid]
            if not q.admits(paper):
                continue
            score = self._snippet_index.score(tokens, key)
            if score > 0.0:
                scored.append((pid, ordinal, score))
        scored.sort(key=lambda item: (-item[2], item[0], item[1]))
        hits = []
        for pid, ordinal, score in scored[:limit]:
            paper = self.papers[pid]
            hits.append(self._snippet_hit(paper, paper.snippets[ordinal], score))
        return SearchResultSet(q.text, MODE_SNIPPET, hits, len(scored) > limit)

    def get_context(
        self, excerpt_text: str, source_paper_id: str, radius: int = 3
    ) -> list[Snippet]:
        """Snippet window around the excerpt in its source paper."""
        paper = self.get_paper(source_paper_id)
        return context_window(paper.snippets, excerpt_text, radius)

    def read_full(self, paper_id: str) -> str:
        paper = self.get_paper(paper_id)
        if not paper.full_text_available:
            raise FullTextUnavailable(f"no full text stored for {paper_id}")
        return render_full_text(paper)

    def get_references(self, paper_id: str) -> list[tuple[str, str]]:
        return list(self.get_paper(paper_id).references)

    def get_paper(self, paper_id: str) -> PaperRecord:
        try:
            return self.papers[paper_id]
        except KeyError:
            raise UnknownPaper(f"unknown paper_id {paper_id!r}") from None

    # -- index artifacts -----------------------------------------------------

    def index_payload(self) -> dict:
        """Canonical, deterministic serialization of records plus postings."""
        return {
            "format": INDEX_FORMAT,
            "papers": [
                record_to_dict(self.papers[pid]) for pid in sorted(self.papers)
            ],
            "doc_index": _index_to_payload(self._doc_index, snippet=False),
            "snippet_index": _index_to_payload(self._snippet_index, snippet=True),
        }

    def save_index(self, path: str | Path) -> None:
        data = json.dumps(
            self.index_payload(), sort_keys=True, separators=(",", ":"),
            ensure_ascii=False,
        )
        Path(path).write_text(data + "\n", encoding="utf-8")

    # -- internals -----------------------------------------------------------

    @staticmethod
    def _query_tokens(q: Query) -> list[str]:
        if not q.text.strip():
            raise EmptyQuery("query text is empty")
        return tokenize(q.text)

    def _paper_hit(self, paper_id: str, score: float) -> SearchHit:
        paper = self.papers[paper_id]
        return SearchHit(
            paper_id=paper_id,
            title=paper.title,
            text=paper.abstract,
            score=score,
            citation_count=paper.citation_count,
            year=paper.year,
        )

    @staticmethod
    def _snippet_hit(paper: PaperRecord, snippet: Snippet, score: float) -> SearchHit:
        return SearchHit(
            paper_id=paper.paper_id,
            title=paper.title,
            text=snippet.text,
            score=score,
            section=snippet.section,
            citation_count=paper.citation_count,
            year=paper.year,
            ordinal=snippet.ordinal,
        )


# -- serialization helpers ----------------------------------------------------


def record_to_dict(record: PaperRecord) -> dict:
    return {
        "paper_id": record.paper_id,
        "title": record.title,
        "abstract": record.abstract,
        "year": record.year,
        "citation_count": record.citation_count,
        "snippets": [
            {"ordinal": s.ordinal, "section": s.section, "text": s.text}
            for s in record.snippets
        ],
        "references": [
            {"paper_id": pid, "title": title} for pid, title in record.references
        ],
    }


def record_from_dict(row: dict, line: int | None = None) -> PaperRecord:
    def fail(message: str):
        raise SchemaError(message, line)

    paper_id = row.get("paper_id")
    if not isinstance(paper_id, str) or not paper_id:
        fail("paper_id must be a non-empty string")
    title = row.get("title")
    if not isinstance(title, str) or not title.strip():
        fail(f"{paper_id}: title must be a non-empty string")
    citation_count = row.get("citation_count", 0)
    if not isinstance(citation_count, int) or citation_count < 0:
        fail(f"{paper_id}: citation_count must be a non-negative integer")
    year = row.get("year")
    if year is not None and not isinstance(year, int):
        fail(f"{paper_id}: year must be an integer")

    raw_snippets = row.get("snippets")
    if raw_snippets:
        try:
            rows = sorted(raw_snippets, key=lambda s: s["ordinal"])
        except (TypeError, KeyError):
            fail(f"{paper_id}: snippets must carry integer ordinals")
        snippets = [
            Snippet(
                paper_id=paper_id,
                ordinal=s["ordinal"],
                section=s.get("section"),
                text=s.get("text", ""),
            )
            for s in rows
        ]
    elif row.get("full_text"):
        snippets = [
            Snippet(paper_id=paper_id, ordinal=i, text=text)
            for i, text in enumerate(segment_text(row["full_text"]))
        ]
    else:
        snippets = []

    references = []
    for ref in row.get("references", []):
        if not isinstance(ref, dict) or "paper_id" not in ref:
            fail(f"{paper_id}: references must be objects with paper_id and title")
        references.append((ref["paper_id"], ref.get("title", "")))

    record = PaperRecord(
        paper_id=paper_id,
        title=title,
        abstract=row.get("abstract", "") or "",
        citation_count=citation_count,
        year=year,
        snippets=snippets,
        references=references,
    )
    try:
        record.validate()
    except ValueError as exc:
        fail(str(exc))
    return record


def load_corpus_jsonl(path: str | Path) -> list[PaperRecord]:
    records: list[PaperRecord] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            if not raw.strip():
                continue
            try:
                row = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON ({exc.msg})", lineno) from None
            if not isinstance(row, dict):
                raise SchemaError("each line must be a JSON object", lineno)
            record = record_from_dict(row, line=lineno)
            if record.paper_id in seen:
                raise DuplicateId(
                    f"duplicate paper_id {record.paper_id!r}", lineno
                )
            seen.add(record.paper_id)
            records.append(record)
    return records


def _index_to_payload(index: _InvertedIndex, snippet: bool) -> dict:
    def key_out(key):
        return list(key) if snippet else key

    return {
        "postings": {
            term: sorted([key_out(k), tf] for k, tf in entries.items())
            for term, entries in index.postings.items()
        },
        "doc_len": sorted([key_out(k), n] for k, n in index.doc_len.items()),
        "doc_count": index.stats.doc_count,
        "total_len": index.stats.total_len,
    }


def _index_from_payload(payload: dict, snippet: bool) -> _InvertedIndex:
    def key_in(key):
        return (key[0], key[1]) if snippet else key

    postings = {
        term: {key_in(k): tf for k, tf in entries}
        for term, entries in payload["postings"].items()
    }
    doc_len = {key_in(k): n for k, n in payload["doc_len"]}
    return _InvertedIndex(
        postings, doc_len, payload["doc_count"], payload["total_len"]
    )
