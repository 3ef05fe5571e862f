"""Solution checking: multiset mapping check, faults, and suggestions.

A mapped attempt is rejected early if any symbol failed to match; otherwise
the set of matched names is checked as a multiset (no two student symbols may
share a target) and against the completeness condition, with instructor
faults evaluated in declaration order.  Suggestions never block acceptance.
"""
from __future__ import annotations

from dataclasses import dataclass, field

# evaluate_condition is re-exported: conditions are checked from here.
from .conditions import evaluate_condition
from .core import (
    Attempt,
    Kind,
    Mapping,
    StudentSymbol,
    SymbolKind,
    parameter_tokens,
)
from .errors import ArityMismatch, BadPayload, DuplicateSymbol, ParameterUnused
from .matcher import negative_feedback
from .taskspec import TaskSpec

INCOMPLETENESS_FEEDBACK = (
    "Your vocabulary is not yet sufficient to model the whole scenario. "
    "Check which statements of the scenario you cannot express yet."
)

# Built-in advisory text for vocabularies carrying interchangeable symbols.
REDUNDANCY_SUGGESTION = (
    "The symbols {names} express the same notion; one of them is enough."
)

ACCEPTED = "accepted"
REJECTED_PHASE1 = "rejected_phase1"
REJECTED_PHASE2 = "rejected_phase2"


@dataclass(frozen=True)
class Verdict:
    status: str
    per_symbol: Mapping
    faults_fired: tuple[str, ...] = ()
    suggestions_fired: tuple[str, ...] = ()
    duplicates: tuple[tuple[str, tuple[str, ...]], ...] = ()
    symbol_feedback: tuple[tuple[str, str], ...] = ()


def check_solution(mapping: Mapping, spec: TaskSpec) -> Verdict:
    negatives = [e for e in mapping.entries if not e.positive]
    if negatives:
        feedback = tuple((e.student.name, negative_feedback(e)) for e in negatives)
        return Verdict(REJECTED_PHASE1, mapping, symbol_feedback=feedback)

    targets: dict[str, list[str]] = {}
    for entry in mapping.entries:
        targets.setdefault(entry.matched.name, []).append(entry.student.name)
    duplicates = tuple(
        (name, tuple(students))
        for name, students in targets.items()
        if len(students) >= 2
    )
    if duplicates:
        return Verdict(REJECTED_PHASE2, mapping, duplicates=duplicates)

    present = mapping.matched_names()
    fired = tuple(
        rule.text for rule in spec.faults if evaluate_condition(rule.when, present)
    )
    if fired:
        return Verdict(REJECTED_PHASE2, mapping, faults_fired=fired)
    if not evaluate_condition(spec.completeness, present):
        return Verdict(REJECTED_PHASE2, mapping, faults_fired=(INCOMPLETENESS_FEEDBACK,))

    suggestions = [
        rule.text for rule in spec.suggestions if evaluate_condition(rule.when, present)
    ]
    for group in spec.redundancies:
        overlap = sorted(group & present)
        if len(overlap) >= 2:
            suggestions.append(REDUNDANCY_SUGGESTION.format(names=", ".join(overlap)))
    return Verdict(ACCEPTED, mapping, suggestions_fired=tuple(suggestions))


def verdict_payload(verdict: Verdict) -> dict:
    """The one JSON shape used by both the CLI and the HTTP service."""
    payload = {
        "status": verdict.status,
        "per_symbol": [
            {
                "name": e.student.name,
                "matched": e.matched.name if e.matched is not None else None,
                "category": e.category.value,
                "positive": e.positive,
                "score": e.score,
                "description_index": e.matched_description_index,
                "permutation": list(e.applied_permutation or []),
            }
            for e in verdict.per_symbol.entries
        ],
        "symbol_feedback": {name: text for name, text in verdict.symbol_feedback},
        "faults_fired": list(verdict.faults_fired),
        "suggestions_fired": list(verdict.suggestions_fired),
        "duplicates": [
            {"potential": name, "students": list(students)}
            for name, students in verdict.duplicates
        ],
    }
    if verdict.status == ACCEPTED:
        # Acceptance implies every symbol matched; hand the mapping onward.
        payload["mapping"] = {
            e.student.name: e.matched.name for e in verdict.per_symbol.entries
        }
    return payload


def attempt_from_payload(payload: object) -> Attempt:
    """Build an Attempt from the submitted JSON shape, validating strictly.

    Omitted params default to u, v, w, ... in argument order.
    """
    if not isinstance(payload, dict) or not isinstance(payload.get("symbols"), list):
        raise BadPayload('expected an object with a "symbols" list')
    symbols = []
    for i, row in enumerate(payload["symbols"]):
        if not isinstance(row, dict):
            raise BadPayload(f"symbols[{i}] is not an object")
        name = row.get("name")
        if not isinstance(name, str) or not name.strip():
            raise BadPayload(f"symbols[{i}] needs a non-empty string name")
        try:
            kind = Kind(row.get("kind"))
        except ValueError:
            raise BadPayload(
                f"symbols[{i}] ({name}): unknown kind {row.get('kind')!r}"
            ) from None
        arity = row.get("arity")
        if arity is not None and not isinstance(arity, int):
            raise BadPayload(f"symbols[{i}] ({name}): arity must be an integer")
        description = row.get("description")
        if not isinstance(description, str):
            raise BadPayload(f"symbols[{i}] ({name}): description must be a string")
        try:
            signature = SymbolKind(kind, arity)
            params = row.get("params")
            if params is None:
                params = parameter_tokens(signature.placeholder_count)
            elif not (
                isinstance(params, list) and all(isinstance(p, str) for p in params)
            ):
                raise BadPayload(f"symbols[{i}] ({name}): params must be strings")
            symbol = StudentSymbol(name.strip(), signature, tuple(params), description)
            symbol.canonical_description  # params must occur in the text
            symbols.append(symbol)
        except (ArityMismatch, ParameterUnused) as exc:
            raise BadPayload(f"symbols[{i}] ({name}): {exc}") from None
    try:
        return Attempt(tuple(symbols))
    except DuplicateSymbol as exc:
        raise BadPayload(str(exc)) from None
