"""Benchmark dataset loading.

Benchmark file: JSON-lines, one item per line:
    {"item_id", "excerpt", "source_title", "source_paper_id",
     "oracle_paper_id", "human_paper_ids": [...], "year", "difficulty"}
The excerpt must contain the marker "[CITATION]" exactly once.

Human-annotation file (set labels collected separately): JSON-lines of
    {"item_id", "human_paper_ids": [...]}
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from ..errors import DuplicateId, SchemaError

CITATION_MARKER = "[CITATION]"
DIFFICULTY_LEVELS = ("easy", "medium", "medium_hard", "hard")


@dataclass(frozen=True)
class BenchmarkItem:
    item_id: str
    excerpt: str
    oracle_paper_id: str
    source_title: str = ""
    source_paper_id: str | None = None
    human_paper_ids: frozenset[str] | None = None
    year: int | None = None
    difficulty: str | None = None


def item_from_dict(row: dict, line: int | None = None) -> BenchmarkItem:
    def fail(message: str):
        raise SchemaError(message, line)

    item_id = row.get("item_id")
    if not isinstance(item_id, str) or not item_id:
        fail("item_id must be a non-empty string")
    excerpt = row.get("excerpt")
    if not isinstance(excerpt, str) or excerpt.count(CITATION_MARKER) != 1:
        fail(f"{item_id}: excerpt must contain {CITATION_MARKER} exactly once")
    oracle = row.get("oracle_paper_id")
    if not isinstance(oracle, str) or not oracle:
        fail(f"{item_id}: oracle_paper_id must be a non-empty string")
    human = row.get("human_paper_ids")
    if human is not None:
        if not isinstance(human, list) or not human:
            fail(f"{item_id}: human_paper_ids must be a non-empty list when present")
        human = frozenset(human)
    difficulty = row.get("difficulty")
    if difficulty is not None and difficulty not in DIFFICULTY_LEVELS:
        fail(f"{item_id}: difficulty must be one of {DIFFICULTY_LEVELS}")
    return BenchmarkItem(
        item_id=item_id,
        excerpt=excerpt,
        oracle_paper_id=oracle,
        source_title=row.get("source_title", "") or "",
        source_paper_id=row.get("source_paper_id"),
        human_paper_ids=human,
        year=row.get("year"),
        difficulty=difficulty,
    )


def load_benchmark(path: str | Path) -> list[BenchmarkItem]:
    items: list[BenchmarkItem] = []
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
            item = item_from_dict(row, line=lineno)
            if item.item_id in seen:
                raise DuplicateId(f"duplicate item_id {item.item_id!r}", lineno)
            seen.add(item.item_id)
            items.append(item)
    if not items:
        raise SchemaError(f"benchmark file {path} contains no items")
    return items


def load_annotations(path: str | Path) -> dict[str, frozenset[str]]:
    labels: dict[str, frozenset[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            if not raw.strip():
                continue
            try:
                row = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON ({exc.msg})", lineno) from None
            item_id = row.get("item_id")
            ids = row.get("human_paper_ids")
            if not isinstance(item_id, str) or not isinstance(ids, list):
                raise SchemaError(
                    "annotation rows need item_id and human_paper_ids", lineno
                )
            labels[item_id] = frozenset(ids)
    return labels


def apply_annotations(
    items: list[BenchmarkItem], labels: dict[str, frozenset[str]]
) -> list[BenchmarkItem]:
    """Overlay separately-collected human label sets onto benchmark items."""
    return [
        replace(item, human_paper_ids=labels[item.item_id])
        if item.item_id in labels and labels[item.item_id]
        else item
        for item in items
    ]
