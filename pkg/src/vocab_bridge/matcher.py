"""Best-fit mapping of student symbols onto the solution vocabulary.

Each student symbol is matched independently against every
signature-compatible potential symbol and description; the winner is the
candidate with the best category, ties broken by score, then declaration
order, then description index.  Duplicate targets are not resolved here:
that is the solution checker's job.
"""
from __future__ import annotations

from typing import Optional

import httpx

from .core import (
    Attempt,
    Category,
    Mapping,
    MappingEntry,
    PotentialSymbol,
    StudentSymbol,
    signature_compatible,
)
from .errors import EmptyAttempt
from .similarity import ScoreResult, ScorerKind, ScoringRequest, Thresholds, classify, score_pairs
from .taskspec import TaskSpec

# Feedback templates for negative matches; callers may pass their own.
C4_FEEDBACK = (
    'The description of "{student}" seems related to "{candidate}", '
    "but it is too vague to count as a match. Try to describe the intended "
    "notion precisely."
)
C5_FEEDBACK = (
    'No symbol in this scenario matches the description of "{student}". '
    "Re-read the scenario and describe one of the notions that occur in it."
)


def negative_feedback(
    entry: MappingEntry,
    c4_template: str = C4_FEEDBACK,
    c5_template: str = C5_FEEDBACK,
) -> str:
    """Phase 1(b) text for an entry with a negative category."""
    if entry.category is Category.C4 and entry.matched is not None:
        return c4_template.format(student=entry.student.name, candidate=entry.matched.name)
    return c5_template.format(student=entry.student.name)


def _candidates(student: StudentSymbol, spec: TaskSpec) -> list[tuple[PotentialSymbol, int]]:
    out = []
    for potential in spec.symbols:
        if not signature_compatible(student.signature, potential.signature):
            continue
        for index in range(1, len(potential.descriptions) + 1):
            out.append((potential, index))
    return out


def _select(
    student: StudentSymbol,
    spec: TaskSpec,
    candidates: list[tuple[PotentialSymbol, int]],
    results: list[ScoreResult],
    thresholds: Thresholds,
) -> MappingEntry:
    if not candidates:
        return MappingEntry(student, None, Category.C5, 0.0)
    best: Optional[tuple] = None
    for (potential, index), result in zip(candidates, results):
        category = classify(result, thresholds, "multiclass")
        rank_key = (
            category.rank,
            -result.score,
            spec.declaration_index(potential.name),
            index,
        )
        if best is None or rank_key < best[0]:
            best = (rank_key, potential, index, category, result)
    _, potential, index, category, result = best
    return MappingEntry(
        student,
        potential,
        category,
        result.score,
        matched_description_index=index,
        applied_permutation=potential.descriptions[index - 1].permutation,
    )


def best_match(
    student: StudentSymbol,
    spec: TaskSpec,
    scorer: ScorerKind,
    thresholds: Thresholds,
    client: Optional[httpx.Client] = None,
) -> MappingEntry:
    candidates = _candidates(student, spec)
    requests = [
        ScoringRequest(
            student.canonical_description,
            potential.descriptions[index - 1].canonical,
            potential.name,
            index,
        )
        for potential, index in candidates
    ]
    results = score_pairs(scorer, requests, spec, client)
    return _select(student, spec, candidates, results, thresholds)


def map_attempt(
    attempt: Attempt,
    spec: TaskSpec,
    scorer: ScorerKind,
    thresholds: Thresholds,
    client: Optional[httpx.Client] = None,
) -> Mapping:
    """Match every attempt symbol; scoring goes out as one batch."""
    if not attempt.symbols:
        raise EmptyAttempt()
    candidates_per_symbol = [_candidates(s, spec) for s in attempt.symbols]
    requests = [
        ScoringRequest(
            student.canonical_description,
            potential.descriptions[index - 1].canonical,
            potential.name,
            index,
        )
        for student, candidates in zip(attempt.symbols, candidates_per_symbol)
        for potential, index in candidates
    ]
    results = score_pairs(scorer, requests, spec, client)
    entries = []
    cursor = 0
    for student, candidates in zip(attempt.symbols, candidates_per_symbol):
        slice_ = results[cursor : cursor + len(candidates)]
        cursor += len(candidates)
        entries.append(_select(student, spec, candidates, slice_, thresholds))
    return Mapping(tuple(entries))
