"""Evaluation report assembly and emission (JSON and plain-text table)."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .benchmark import BenchmarkItem, DIFFICULTY_LEVELS
from .difficulty import COUNT_RULE_NOTE
from .metrics import (
    RunRecord,
    accuracy,
    agreement,
    budget_summary,
    format_pct,
)

_TABLE_COLUMNS = (
    ("easy", "Easy(%)"),
    ("medium", "Medium(%)"),
    ("medium_hard", "Med-Hard(%)"),
    ("hard", "Hard(%)"),
)


@dataclass
class EvalReport:
    n_items: int
    accuracy: float
    agreement: float | None
    per_difficulty: dict[str, float | None]
    stratum_sizes: dict[str, int]
    avg_input_tokens: float
    avg_output_tokens: float
    model_name: str = ""
    per_item: list[dict] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "EvalReport":
        return cls(**data)


def build_report(
    items: Sequence[BenchmarkItem],
    records: Sequence[RunRecord],
    suggestion_sets: Mapping[str, Sequence[str]] | None = None,
    model_name: str = "",
) -> EvalReport:
    """Aggregate per-item run records into the benchmark report.

    Accuracy uses first-run records only; agreement, when human labels and
    multi-run suggestion sets exist, uses the full suggestion sets.
    """
    overall = accuracy(records, items)
    by_item = {record.item_id: record for record in records}

    per_difficulty: dict[str, float | None] = {}
    stratum_sizes: dict[str, int] = {}
    for level in DIFFICULTY_LEVELS:
        stratum = [item for item in items if item.difficulty == level]
        stratum_sizes[level] = len(stratum)
        if stratum:
            per_difficulty[level] = float(format_pct(accuracy(records, stratum)))
        else:
            per_difficulty[level] = None

    metadata: dict = {"difficulty_count_rule": COUNT_RULE_NOTE}
    agreement_value = None
    if suggestion_sets is not None and any(item.human_paper_ids for item in items):
        result = agreement(suggestion_sets, items)
        agreement_value = float(format_pct(result.value))
        metadata["agreement_counted"] = result.counted
        if result.skipped:
            metadata["agreement_skipped"] = result.skipped

    avg_in, avg_out = budget_summary(list(records))
    per_item = []
    for item in items:
        record = by_item[item.item_id]
        per_item.append(
            {
                "item_id": item.item_id,
                "correct": record.correct,
                "suggestions": list(record.suggestions),
                "difficulty": item.difficulty,
                "input_tokens": record.usage.input_tokens,
                "output_tokens": record.usage.output_tokens,
                "history_length": record.history_length,
            }
        )

    return EvalReport(
        n_items=len(items),
        accuracy=float(format_pct(overall)),
        agreement=agreement_value,
        per_difficulty=per_difficulty,
        stratum_sizes=stratum_sizes,
        avg_input_tokens=float(avg_in),
        avg_output_tokens=float(avg_out),
        model_name=model_name,
        per_item=per_item,
        metadata=metadata,
    )


def render_table(report: EvalReport) -> str:
    """Difficulty columns, All, Agree; empty strata render '-'."""
    header = [label for _, label in _TABLE_COLUMNS] + ["All(%)", "Agree(%)"]
    cells = [_cell(report.per_difficulty.get(level)) for level, _ in _TABLE_COLUMNS]
    cells.append(_cell(report.accuracy))
    cells.append(_cell(report.agreement))
    return "  ".join(header) + "\n" + "  ".join(cells)


def render_text_report(report: EvalReport) -> str:
    lines = [
        f"model: {report.model_name or '-'}",
        f"items: {report.n_items}",
        render_table(report),
        f"avg input tokens: {report.avg_input_tokens:.2f}",
        f"avg output tokens: {report.avg_output_tokens:.2f}",
    ]
    return "\n".join(lines) + "\n"


def emit_report(report: EvalReport, out_dir: str | Path) -> tuple[Path, Path]:
    """Write report.json and report.txt; returns both paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path = out / "report.json"
    text_path = out / "report.txt"
    json_path.write_text(
        json.dumps(report.to_dict(), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
    text_path.write_text(render_text_report(report), encoding="utf-8")
    return json_path, text_path


def _cell(value: float | None) -> str:
    return "-" if value is None else f"{value:.1f}"
