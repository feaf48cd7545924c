"""Benchmark metrics in exact rational arithmetic.

Percentages are computed as Fractions and only rounded at render time
(one decimal, round half up). Token averages render to two decimals.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, ROUND_HALF_UP
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ..errors import EmptyInput, MissingHumanLabels, MissingRecord
from ..gateway import CompletionUsage
from .benchmark import BenchmarkItem


@dataclass
class RunRecord:
    """Outcome of one agent run on one benchmark item."""

    item_id: str
    model_name: str
    run_index: int
    suggestions: list[str]
    correct: bool
    usage: CompletionUsage
    history_length: int = 0


def canonical_id(paper_id: str) -> str:
    return paper_id.strip()


def is_correct(suggestions: Sequence[str], oracle_paper_id: str) -> bool:
    """Oracle match on the first suggestion."""
    return bool(suggestions) and canonical_id(suggestions[0]) == canonical_id(
        oracle_paper_id
    )


def make_run_record(
    item: BenchmarkItem,
    suggestions: Sequence[str],
    model_name: str,
    usage: CompletionUsage,
    run_index: int = 0,
    history_length: int = 0,
) -> RunRecord:
    return RunRecord(
        item_id=item.item_id,
        model_name=model_name,
        run_index=run_index,
        suggestions=list(suggestions),
        correct=is_correct(suggestions, item.oracle_paper_id),
        usage=usage,
        history_length=history_length,
    )


def accuracy(records: Iterable[RunRecord], items: Sequence[BenchmarkItem]) -> Fraction:
    """Fraction of items whose first-run suggestion equals the oracle, x100."""
    by_item = {record.item_id: record for record in records}
    missing = [item.item_id for item in items if item.item_id not in by_item]
    if missing:
        raise MissingRecord(f"no run record for items: {missing}")
    if not items:
        raise EmptyInput("no benchmark items")
    correct = sum(1 for item in items if by_item[item.item_id].correct)
    return Fraction(100 * correct, len(items))


@dataclass
class AgreementResult:
    value: Fraction
    counted: int
    skipped: list[str] = field(default_factory=list)


def agreement(
    suggestion_sets: Mapping[str, Sequence[str]],
    items: Sequence[BenchmarkItem],
    strict: bool = False,
) -> AgreementResult:
    """Fraction of items whose suggestions intersect the human label set, x100.

    Items without human labels are excluded and reported, or rejected
    outright when strict is set.
    """
    hits = 0
    counted = 0
    skipped: list[str] = []
    for item in items:
        if not item.human_paper_ids:
            if strict:
                raise MissingHumanLabels(f"item {item.item_id} has no human labels")
            skipped.append(item.item_id)
            continue
        counted += 1
        suggested = {canonical_id(s) for s in suggestion_sets.get(item.item_id, ())}
        labeled = {canonical_id(s) for s in item.human_paper_ids}
        if suggested & labeled:
            hits += 1
    value = Fraction(100 * hits, counted) if counted else Fraction(0)
    return AgreementResult(value=value, counted=counted, skipped=skipped)


def top_k_accuracy(
    ranked: Mapping[str, Sequence[str]], items: Sequence[BenchmarkItem], k: int
) -> Fraction:
    """Fraction of items whose oracle id is within the first k ranked ids, x100."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not items:
        raise EmptyInput("no benchmark items")
    correct = 0
    for item in items:
        head = [canonical_id(s) for s in ranked.get(item.item_id, ())[:k]]
        if canonical_id(item.oracle_paper_id) in head:
            correct += 1
    return Fraction(100 * correct, len(items))


def budget_summary(records: Sequence[RunRecord]) -> tuple[Decimal, Decimal]:
    """Mean input/output tokens per record, two decimals."""
    if not records:
        raise EmptyInput("no run records")
    total_in = sum(record.usage.input_tokens for record in records)
    total_out = sum(record.usage.output_tokens for record in records)
    n = len(records)
    return (
        _to_decimal(Fraction(total_in, n), places="0.01"),
        _to_decimal(Fraction(total_out, n), places="0.01"),
    )


def format_pct(value: Fraction) -> str:
    """Render an exact percentage to one decimal, round half up."""
    return str(_to_decimal(value, places="0.1"))


def _to_decimal(value: Fraction, places: str) -> Decimal:
    return (Decimal(value.numerator) / Decimal(value.denominator)).quantize(
        Decimal(places), rounding=ROUND_HALF_UP
    )
