"""Binary and multiclass evaluation reports over labeled, scored pairs.

All ratios are kept as exact fractions so the identity correct + errors = 1
holds without floating-point slack; rendering rounds half-up to two decimal
percent digits only at the edge.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import httpx

from .core import Category
from .errors import EmptyDataset
from .similarity import ScorerKind, Thresholds, classify, request_for_pair, score_pairs
from .taskspec import TaskSpec


def render_percent(value: Fraction) -> str:
    """Exact half-up rendering of a ratio as a 2-decimal percentage."""
    hundredths = value * 10000
    whole, remainder = divmod(hundredths.numerator, hundredths.denominator)
    if 2 * remainder >= hundredths.denominator:
        whole += 1
    return f"{whole // 100}.{whole % 100:02d}"


def _ratio(part: int, total: int, empty: Fraction = Fraction(1)) -> Fraction:
    # An empty denominator means the quantity is vacuously perfect.
    return Fraction(part, total) if total else empty


@dataclass(frozen=True)
class BinaryReport:
    n: int
    n_pos: int
    n_neg: int
    correct: Fraction
    false_pos: Fraction
    false_neg: Fraction
    p_pos_given_pos: Fraction
    p_neg_given_neg: Fraction

    def render(self) -> str:
        rows = [
            f"binary report (n={self.n}, pos={self.n_pos}, neg={self.n_neg})",
            f"  correct    {render_percent(self.correct):>7}%",
            f"  false_pos  {render_percent(self.false_pos):>7}%",
            f"  false_neg  {render_percent(self.false_neg):>7}%",
            f"  P[P|pos]   {render_percent(self.p_pos_given_pos):>7}%",
            f"  P[N|neg]   {render_percent(self.p_neg_given_neg):>7}%",
        ]
        return "\n".join(rows)


@dataclass(frozen=True)
class MulticlassReport:
    n: int
    correct: Fraction
    too_high: Fraction
    too_low: Fraction
    p_pos_given_pos: Fraction
    p_neg_given_neg: Fraction

    def render(self) -> str:
        rows = [
            f"multiclass report (n={self.n})",
            f"  correct    {render_percent(self.correct):>7}%",
            f"  too_high   {render_percent(self.too_high):>7}%",
            f"  too_low    {render_percent(self.too_low):>7}%",
            f"  P[P|pos]   {render_percent(self.p_pos_given_pos):>7}%",
            f"  P[N|neg]   {render_percent(self.p_neg_given_neg):>7}%",
        ]
        return "\n".join(rows)


def binary_report(rows: Sequence[tuple[Category, bool]]) -> BinaryReport:
    if not rows:
        raise EmptyDataset()
    n = len(rows)
    n_pos = sum(label.positive for label, _ in rows)
    n_neg = n - n_pos
    hits = sum(predicted == label.positive for label, predicted in rows)
    false_pos = sum(predicted and not label.positive for label, predicted in rows)
    false_neg = sum(label.positive and not predicted for label, predicted in rows)
    return BinaryReport(
        n=n,
        n_pos=n_pos,
        n_neg=n_neg,
        correct=Fraction(hits, n),
        false_pos=Fraction(false_pos, n),
        false_neg=Fraction(false_neg, n),
        p_pos_given_pos=_ratio(n_pos - false_neg, n_pos),
        p_neg_given_neg=_ratio(n_neg - false_pos, n_neg),
    )


def multiclass_report(rows: Sequence[tuple[Category, Category]]) -> MulticlassReport:
    if not rows:
        raise EmptyDataset()
    n = len(rows)
    hits = sum(predicted is label for label, predicted in rows)
    too_high = sum(predicted.rank < label.rank for label, predicted in rows)
    too_low = sum(predicted.rank > label.rank for label, predicted in rows)
    positives = [(label, predicted) for label, predicted in rows if label.positive]
    negatives = [(label, predicted) for label, predicted in rows if not label.positive]
    return MulticlassReport(
        n=n,
        correct=Fraction(hits, n),
        too_high=Fraction(too_high, n),
        too_low=Fraction(too_low, n),
        p_pos_given_pos=_ratio(
            sum(predicted.positive for _, predicted in positives), len(positives)
        ),
        p_neg_given_neg=_ratio(
            sum(not predicted.positive for _, predicted in negatives), len(negatives)
        ),
    )


def evaluate_dataset(
    pairs: Sequence,
    scorer: ScorerKind,
    thresholds: Thresholds,
    spec: Optional[TaskSpec] = None,
    split: Optional[str] = None,
    client: Optional[httpx.Client] = None,
) -> tuple[BinaryReport, MulticlassReport]:
    """Score labeled pairs once and aggregate both reports.

    split filters the dataset to one side of the train/eval partition; None
    evaluates everything.
    """
    selected = [p for p in pairs if split is None or p.split == split]
    if not selected:
        raise EmptyDataset()
    results = score_pairs(
        scorer, [request_for_pair(spec, p) for p in selected], spec, client
    )
    binary_rows = []
    multiclass_rows = []
    for pair, result in zip(selected, results):
        binary_rows.append((pair.category, classify(result, thresholds, "binary")))
        multiclass_rows.append((pair.category, classify(result, thresholds, "multiclass")))
    return binary_report(binary_rows), multiclass_report(multiclass_rows)
