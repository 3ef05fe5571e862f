"""Grading engine for vocabulary design tasks.

Students describe the symbols of a propositional or first-order vocabulary in
natural language; the engine maps each description to a best-fitting symbol
of the task's solution vocabulary (phase 1), then checks the mapped multiset
against the task's completeness condition and instructor feedback rules
(phase 2).
"""
from .checker import (
    ACCEPTED,
    REJECTED_PHASE1,
    REJECTED_PHASE2,
    Verdict,
    attempt_from_payload,
    check_solution,
    verdict_payload,
)
from .core import (
    CANONICAL_SCORES,
    Attempt,
    Category,
    Description,
    Kind,
    Mapping,
    MappingEntry,
    PotentialSymbol,
    StudentSymbol,
    SymbolKind,
    TranslationTemplate,
    normalize_description,
)
from .dataset import LabeledPair, generate_dataset, read_dataset, write_dataset
from .errors import VocabBridgeError
from .matcher import best_match, map_attempt
from .reports import (
    BinaryReport,
    MulticlassReport,
    binary_report,
    evaluate_dataset,
    multiclass_report,
)
from .similarity import (
    DEFAULT_THRESHOLDS,
    ScorerKind,
    Thresholds,
    check_remote_protocol,
    default_scorer,
    fit_thresholds,
    lexical_score,
    score_pairs,
)
from .taskspec import SolutionSet, TaskSpec, parse_task_spec, validate_spec

__all__ = [
    "ACCEPTED",
    "CANONICAL_SCORES",
    "DEFAULT_THRESHOLDS",
    "REJECTED_PHASE1",
    "REJECTED_PHASE2",
    "Attempt",
    "BinaryReport",
    "Category",
    "Description",
    "Kind",
    "LabeledPair",
    "Mapping",
    "MappingEntry",
    "MulticlassReport",
    "PotentialSymbol",
    "ScorerKind",
    "SolutionSet",
    "StudentSymbol",
    "SymbolKind",
    "TaskSpec",
    "Thresholds",
    "TranslationTemplate",
    "Verdict",
    "VocabBridgeError",
    "attempt_from_payload",
    "best_match",
    "binary_report",
    "check_remote_protocol",
    "check_solution",
    "default_scorer",
    "evaluate_dataset",
    "fit_thresholds",
    "generate_dataset",
    "lexical_score",
    "map_attempt",
    "multiclass_report",
    "normalize_description",
    "parse_task_spec",
    "read_dataset",
    "score_pairs",
    "validate_spec",
    "verdict_payload",
    "write_dataset",
]
