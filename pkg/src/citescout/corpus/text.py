"""Tokenization, lexical scoring, and snippet text utilities.

The relevance function used by the local backend is BM25 (k1=1.2, b=0.75)
over lowercased, punctuation-stripped, whitespace-tokenized text. The
scoring pieces live here as free functions so tests can score documents
exhaustively, independent of any index structure.
"""
from __future__ import annotations

import math
import re
from collections import Counter
from typing import Iterable, Mapping, Sequence

from ..errors import ExcerptNotFound
from .types import PaperRecord, Snippet

K1 = 1.2
B = 0.75

_TOKEN = re.compile(r"[a-z0-9]+")
_CITATION_MARKER = re.compile(r"\[citation\]", re.IGNORECASE)
_NUMERIC_REF = re.compile(r"\[\d+(?:\s*,\s*\d+)*\]")
_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+")


def tokenize(text: str) -> list[str]:
    """Lowercase, strip punctuation, split on whitespace."""
    return _TOKEN.findall(text.lower())


def normalize_for_match(text: str) -> str:
    """Canonical form used to locate an excerpt inside source snippets.

    Citation markers and bracketed numeric references are dropped so an
    excerpt with a masked citation still matches the original sentence.
    """
    text = _CITATION_MARKER.sub(" ", text)
    text = _NUMERIC_REF.sub(" ", text)
    return " ".join(tokenize(text))


class CollectionStats:
    """Per-collection statistics required to BM25-score one document."""

    def __init__(self, df: dict[str, int], doc_count: int, total_len: int):
        self.df = df
        self.doc_count = doc_count
        self.total_len = total_len
        self.avg_len = (total_len / doc_count) if doc_count else 0.0

    @classmethod
    def from_documents(cls, doc_tokens: Iterable[Sequence[str]]) -> "CollectionStats":
        doc_count = 0
        total_len = 0
        df: Counter[str] = Counter()
        for tokens in doc_tokens:
            doc_count += 1
            total_len += len(tokens)
            df.update(set(tokens))
        return cls(dict(df), doc_count, total_len)

    def idf(self, term: str) -> float:
        n = self.df.get(term, 0)
        if n == 0:
            return 0.0
        # Okapi idf with the +1 floor: strictly positive for any present term.
        return math.log((self.doc_count - n + 0.5) / (n + 0.5) + 1.0)


def bm25_score(
    query_tokens: Sequence[str],
    term_freq: Mapping[str, int],
    doc_len: int,
    stats: CollectionStats,
) -> float:
    """Score one document against a tokenized query. Zero iff no term matches."""
    if stats.avg_len == 0:
        return 0.0
    norm = K1 * (1.0 - B + B * doc_len / stats.avg_len)
    score = 0.0
    for term in query_tokens:
        f = term_freq.get(term, 0)
        if f == 0:
            continue
        score += stats.idf(term) * f * (K1 + 1.0) / (f + norm)
    return score


def segment_text(text: str, max_tokens: int = 512) -> list[str]:
    """Split raw full text into snippets.

    Rule: split on blank lines; any segment longer than `max_tokens` is
    sentence-split and regrouped into chunks within the limit. A single
    over-long sentence stands alone.
    """
    segments = []
    for block in re.split(r"\n\s*\n", text):
        block = " ".join(block.split())
        if not block:
            continue
        if len(tokenize(block)) <= max_tokens:
            segments.append(block)
            continue
        chunk: list[str] = []
        chunk_len = 0
        for sentence in _SENTENCE_SPLIT.split(block):
            n = len(tokenize(sentence))
            if chunk and chunk_len + n > max_tokens:
                segments.append(" ".join(chunk))
                chunk, chunk_len = [], 0
            chunk.append(sentence)
            chunk_len += n
        if chunk:
            segments.append(" ".join(chunk))
    return segments


def locate_excerpt(snippets: Sequence[Snippet], excerpt_text: str) -> int:
    """Index of the snippet containing the excerpt, by normalized substring match."""
    needle = normalize_for_match(excerpt_text)
    if needle:
        for i, snippet in enumerate(snippets):
            if needle in normalize_for_match(snippet.text):
                return i
    raise ExcerptNotFound("excerpt not found in source full text")


def context_window(
    snippets: Sequence[Snippet], excerpt_text: str, radius: int = 3
) -> list[Snippet]:
    """The matched snippet plus up to `radius` neighbors each side, in order."""
    center = locate_excerpt(snippets, excerpt_text)
    lo = max(0, center - radius)
    hi = min(len(snippets), center + radius + 1)
    return list(snippets[lo:hi])


def render_full_text(record: PaperRecord) -> str:
    """All snippets in ordinal order, one per line, with '## ' section headings."""
    lines: list[str] = []
    current_section = None
    for snippet in record.snippets:
        if snippet.section and snippet.section != current_section:
            lines.append(f"## {snippet.section}")
            current_section = snippet.section
        lines.append(snippet.text)
    return "\n".join(lines)
