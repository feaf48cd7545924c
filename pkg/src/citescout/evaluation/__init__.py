"""Benchmark harness: dataset loading, metrics, difficulty labels, reports."""
from .benchmark import (
    BenchmarkItem,
    CITATION_MARKER,
    DIFFICULTY_LEVELS,
    apply_annotations,
    item_from_dict,
    load_annotations,
    load_benchmark,
)
from .difficulty import (
    COUNT_RULE_NOTE,
    DifficultyLabel,
    label_difficulty,
    label_for_count,
)
from .metrics import (
    AgreementResult,
    RunRecord,
    accuracy,
    agreement,
    budget_summary,
    canonical_id,
    format_pct,
    is_correct,
    make_run_record,
    top_k_accuracy,
)
from .report import (
    EvalReport,
    build_report,
    emit_report,
    render_table,
    render_text_report,
)

__all__ = [
    "AgreementResult",
    "BenchmarkItem",
    "CITATION_MARKER",
    "COUNT_RULE_NOTE",
    "DIFFICULTY_LEVELS",
    "DifficultyLabel",
    "EvalReport",
    "RunRecord",
    "accuracy",
    "agreement",
    "apply_annotations",
    "budget_summary",
    "build_report",
    "canonical_id",
    "emit_report",
    "format_pct",
    "is_correct",
    "item_from_dict",
    "label_difficulty",
    "label_for_count",
    "load_annotations",
    "load_benchmark",
    "make_run_record",
    "render_table",
    "render_text_report",
    "top_k_accuracy",
]
