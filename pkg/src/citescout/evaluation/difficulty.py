"""Difficulty labeling from a per-model correctness matrix.

With M models, an item is easy when all M solved it and hard when none
did. Between those, no more than two correct is medium_hard, and anything
above two (up to M-1) is medium. The count-3 boundary is therefore labeled
medium; report metadata records this closure rule. The four levels
partition every possible count 0..M for any M >= 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

COUNT_RULE_NOTE = "counts above two and below M are labeled medium (includes count 3)"


@dataclass(frozen=True)
class DifficultyLabel:
    level: str
    correct_model_count: int


def label_for_count(count: int, model_count: int) -> str:
    if count < 0 or count > model_count:
        raise ValueError(f"count {count} outside 0..{model_count}")
    if count == model_count:
        return "easy"
    if count == 0:
        return "hard"
    if count <= 2:
        return "medium_hard"
    return "medium"


def label_difficulty(
    correct_matrix: Mapping[str, Sequence[bool]],
) -> dict[str, DifficultyLabel]:
    """Label every item from its row of per-model correctness flags."""
    if not correct_matrix:
        return {}
    sizes = {len(row) for row in correct_matrix.values()}
    if len(sizes) != 1:
        raise ValueError("all items must be scored by the same models")
    model_count = sizes.pop()
    if model_count < 1:
        raise ValueError("need at least one model")
    labels = {}
    for item_id, row in correct_matrix.items():
        count = sum(1 for flag in row if flag)
        labels[item_id] = DifficultyLabel(
            level=label_for_count(count, model_count),
            correct_model_count=count,
        )
    return labels
