"""Paper-database abstraction: search primitives over local or remote backends."""
from __future__ import annotations

from typing import Protocol, runtime_checkable

from .local import LocalCorpus, load_corpus_jsonl, record_from_dict, record_to_dict
from .remote import HttpTransport, RecordedTransport, RemoteCorpus
from .text import (
    bm25_score,
    context_window,
    normalize_for_match,
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


@runtime_checkable
class CorpusBackend(Protocol):
    """Operation contract satisfied by both LocalCorpus and RemoteCorpus."""

    def search_relevance(self, q: Query, limit: int = 10) -> SearchResultSet: ...
    def search_citation_count(self, q: Query, limit: int = 10) -> SearchResultSet: ...
    def find_in_text(self, paper_id: str, q: Query, limit: int = 10) -> SearchResultSet: ...
    def search_text_snippet(self, q: Query, limit: int = 10) -> SearchResultSet: ...
    def get_context(self, excerpt_text: str, source_paper_id: str, radius: int = 3) -> list[Snippet]: ...
    def read_full(self, paper_id: str) -> str: ...
    def get_references(self, paper_id: str) -> list[tuple[str, str]]: ...
    def get_paper(self, paper_id: str) -> PaperRecord: ...


__all__ = [
    "CorpusBackend",
    "HttpTransport",
    "LocalCorpus",
    "MODE_CITATION_COUNT",
    "MODE_IN_PAPER",
    "MODE_RELEVANCE",
    "MODE_SNIPPET",
    "PaperRecord",
    "Query",
    "RecordedTransport",
    "RemoteCorpus",
    "SearchHit",
    "SearchResultSet",
    "Snippet",
    "bm25_score",
    "context_window",
    "load_corpus_jsonl",
    "normalize_for_match",
    "record_from_dict",
    "record_to_dict",
    "render_full_text",
    "segment_text",
    "tokenize",
]
