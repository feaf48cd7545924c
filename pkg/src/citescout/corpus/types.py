"""Record types for the paper database."""
from __future__ import annotations

from dataclasses import dataclass, field

MODE_RELEVANCE = "relevance"
MODE_CITATION_COUNT = "citation_count"
MODE_SNIPPET = "snippet"
MODE_IN_PAPER = "in_paper"


@dataclass(frozen=True)
class Snippet:
    """One body passage of a paper. Ordinals are contiguous from 0."""

    paper_id: str
    ordinal: int
    text: str
    section: str | None = None


@dataclass
class PaperRecord:
    """One paper: searchable title+abstract plus ordered body snippets."""

    paper_id: str
    title: str
    abstract: str = ""
    citation_count: int = 0
    year: int | None = None
    snippets: list[Snippet] = field(default_factory=list)
    references: list[tuple[str, str]] = field(default_factory=list)

    @property
    def full_text_available(self) -> bool:
        return bool(self.snippets)

    @property
    def searchable_text(self) -> str:
        """The field paper search matches against."""
        return f"{self.title}\n{self.abstract}" if self.abstract else self.title

    def validate(self) -> None:
        if not self.paper_id:
            raise ValueError("paper_id must be non-empty")
        if self.citation_count < 0:
            raise ValueError(f"{self.paper_id}: citation_count must be >= 0")
        for i, snippet in enumerate(self.snippets):
            if snippet.ordinal != i:
                raise ValueError(
                    f"{self.paper_id}: snippet ordinals must be contiguous from 0"
                )
            if not snippet.text.strip():
                raise ValueError(f"{self.paper_id}: snippet {i} has empty text")


@dataclass(frozen=True)
class Query:
    """A search query plus the session's result filters."""

    text: str
    year_cutoff: int | None = None
    excluded_paper_ids: frozenset[str] = frozenset()

    def admits(self, paper: PaperRecord) -> bool:
        """Filter check: exclusion list and year cutoff."""
        if paper.paper_id in self.excluded_paper_ids:
            return False
        if (
            self.year_cutoff is not None
            and paper.year is not None
            and paper.year > self.year_cutoff
        ):
            return False
        return True


@dataclass(frozen=True)
class SearchHit:
    """One row of a result set; `text` is an abstract or a snippet body."""

    paper_id: str
    title: str
    text: str
    score: float
    section: str | None = None
    citation_count: int | None = None
    year: int | None = None
    ordinal: int | None = None


@dataclass
class SearchResultSet:
    query: str
    mode: str
    hits: list[SearchHit]
    truncated: bool = False

    def __post_init__(self):
        for a, b in zip(self.hits, self.hits[1:]):
            if a.score < b.score:
                raise ValueError("hits must be sorted non-increasing by score")
