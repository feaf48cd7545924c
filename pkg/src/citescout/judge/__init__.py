"""LLM-as-a-judge citation attribution: three-way labels plus P/R/F1 scoring.

A verdict label is the first of {attributable, contradictory, extrapolatory}
to occur (case-insensitively) in the model response. A response containing
none of them is recorded as an abstention and scored as a negative
prediction. Scoring treats attributable as the positive class and keeps
exact rational arithmetic until the two-decimal render.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal, ROUND_HALF_UP
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from ..corpus import PaperRecord, render_full_text
from ..errors import MissingAsset, SchemaError
from ..gateway import ChatMessage, Gateway, ModelProfile, ROLE_SYSTEM, ROLE_USER

LABELS = ("attributable", "contradictory", "extrapolatory")
SCOPE_ABSTRACT = "abstract"
SCOPE_FULL_TEXT = "full_text"

_ASSET_DIR = Path(__file__).parent / "assets"


@dataclass(frozen=True)
class AttributionCase:
    case_id: str
    claim: str
    reference_text: str
    reference_scope: str = SCOPE_ABSTRACT
    gold: str = "attributable"

    def __post_init__(self):
        if not self.claim or not self.reference_text:
            raise ValueError("claim and reference_text must be non-empty")
        if self.gold not in LABELS:
            raise ValueError(f"gold must be one of {LABELS}")
        if self.reference_scope not in (SCOPE_ABSTRACT, SCOPE_FULL_TEXT):
            raise ValueError("reference_scope must be abstract or full_text")


@dataclass(frozen=True)
class JudgeVerdict:
    case_id: str
    label: str | None  # None records an abstention
    raw: str


def _load_asset(name: str) -> str:
    path = _ASSET_DIR / name
    if not path.is_file():
        raise MissingAsset(f"judge asset {name!r} not found at {path}")
    return path.read_text(encoding="utf-8").strip()


def build_prompt(case: AttributionCase, shots: str = "zero") -> list[ChatMessage]:
    if shots not in ("zero", "few"):
        raise ValueError("shots must be 'zero' or 'few'")
    system = _load_asset("judge_prompt.txt")
    if shots == "few":
        system = f"{system}\n\n{_load_asset('judge_fewshot.txt')}"
    user = f"Claim: {case.claim}\n\nReference: {case.reference_text}"
    return [ChatMessage(ROLE_SYSTEM, system), ChatMessage(ROLE_USER, user)]


def extract_label(raw: str) -> str | None:
    """First label keyword to occur wins; None when no keyword occurs."""
    lowered = raw.lower()
    best = None
    best_pos = len(lowered) + 1
    for label in LABELS:
        pos = lowered.find(label)
        if 0 <= pos < best_pos:
            best, best_pos = label, pos
    return best


def judge(
    case: AttributionCase,
    gateway: Gateway,
    profile: ModelProfile,
    shots: str = "zero",
) -> JudgeVerdict:
    raw, _ = gateway.complete(profile, build_prompt(case, shots))
    return JudgeVerdict(case_id=case.case_id, label=extract_label(raw), raw=raw)


def reference_text_for(record: PaperRecord, scope: str) -> str:
    """Reference text at the requested scope: abstract only, or the full body."""
    if scope == SCOPE_ABSTRACT:
        return f"{record.title}\n{record.abstract}".strip()
    if scope == SCOPE_FULL_TEXT:
        return f"{record.title}\n{render_full_text(record)}".strip()
    raise ValueError("scope must be abstract or full_text")


@dataclass
class ScoreResult:
    precision: Fraction
    recall: Fraction
    f1: Fraction
    abstentions: int = 0
    confusion: dict[str, int] = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)

    @property
    def rendered(self) -> tuple[str, str, str]:
        return (
            render_2dp(self.precision),
            render_2dp(self.recall),
            render_2dp(self.f1),
        )


def f1_exact(precision: Fraction, recall: Fraction) -> Fraction:
    if precision + recall == 0:
        return Fraction(0)
    return 2 * precision * recall / (precision + recall)


def render_2dp(value: Fraction) -> str:
    return str(
        (Decimal(value.numerator) / Decimal(value.denominator)).quantize(
            Decimal("0.01"), rounding=ROUND_HALF_UP
        )
    )


def score(
    verdicts: Iterable[JudgeVerdict], cases: Sequence[AttributionCase]
) -> ScoreResult:
    """Precision/recall/F1 with attributable as positive; abstention = negative."""
    by_case = {verdict.case_id: verdict for verdict in verdicts}
    tp = fp = fn = 0
    abstentions = 0
    confusion: dict[str, int] = {}
    for case in cases:
        verdict = by_case.get(case.case_id)
        predicted = verdict.label if verdict else None
        if predicted is None:
            abstentions += 1
        key = f"{case.gold}->{predicted or 'abstain'}"
        confusion[key] = confusion.get(key, 0) + 1
        gold_pos = case.gold == "attributable"
        pred_pos = predicted == "attributable"
        if pred_pos and gold_pos:
            tp += 1
        elif pred_pos:
            fp += 1
        elif gold_pos:
            fn += 1
    flags = []
    if tp + fp == 0:
        precision = Fraction(0)
        flags.append("empty_precision_denominator")
    else:
        precision = Fraction(tp, tp + fp)
    if tp + fn == 0:
        recall = Fraction(0)
        flags.append("empty_recall_denominator")
    else:
        recall = Fraction(tp, tp + fn)
    return ScoreResult(
        precision=precision,
        recall=recall,
        f1=f1_exact(precision, recall),
        abstentions=abstentions,
        confusion=confusion,
        flags=flags,
    )


def load_cases(path: str | Path) -> list[AttributionCase]:
    cases: list[AttributionCase] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            if not raw.strip():
                continue
            try:
                row = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON ({exc.msg})", lineno) from None
            try:
                cases.append(
                    AttributionCase(
                        case_id=row["case_id"],
                        claim=row["claim"],
                        reference_text=row["reference_text"],
                        reference_scope=row.get("reference_scope", SCOPE_ABSTRACT),
                        gold=row.get("gold", "attributable"),
                    )
                )
            except (KeyError, ValueError) as exc:
                raise SchemaError(str(exc), lineno) from None
    return cases


def write_verdicts(verdicts: Sequence[JudgeVerdict], path: str | Path) -> None:
    lines = [
        json.dumps(
            {"case_id": v.case_id, "label": v.label, "raw": v.raw},
            ensure_ascii=False,
        )
        for v in verdicts
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
