"""Phase 2 checking on the fixture tasks."""
import itertools
import json

import pytest

from vocab_bridge.checker import (
    ACCEPTED,
    INCOMPLETENESS_FEEDBACK,
    REJECTED_PHASE1,
    REJECTED_PHASE2,
    attempt_from_payload,
    check_solution,
    evaluate_condition,
    verdict_payload,
)
from vocab_bridge.errors import BadPayload
from vocab_bridge.conditions import parse_condition
from vocab_bridge.core import (
    Attempt,
    Category,
    Description,
    Kind,
    Mapping,
    MappingEntry,
    PotentialSymbol,
    StudentSymbol,
    SymbolKind,
)
from vocab_bridge.matcher import map_attempt
from vocab_bridge.similarity import DEFAULT_THRESHOLDS, ScorerKind
from vocab_bridge.taskspec import TaskSpec, parse_task_spec

from test_taskspec import FIXTURES

GRAMMAR = ScorerKind.grammar()


@pytest.fixture(scope="module")
def book():
    doc = (FIXTURES / "book_collection.xml").read_text(encoding="utf-8")
    return parse_task_spec(doc, base_dir=FIXTURES)


@pytest.fixture(scope="module")
def lecture():
    doc = (FIXTURES / "lecture_participation.xml").read_text(encoding="utf-8")
    return parse_task_spec(doc, base_dir=FIXTURES)


CANONICAL_BOOK = {
    "B": (Kind.RELATION, 1, ("x",), "x is a book"),
    "A": (Kind.RELATION, 1, ("x",), "x is an author"),
    "M": (Kind.RELATION, 1, ("x",), "author x is a mathematician"),
    "L": (Kind.RELATION, 1, ("x",), "book x deals with logic"),
    "R": (Kind.RELATION, 2, ("x", "y"), "book x refutes book y"),
    "f": (Kind.FUNCTION, 1, ("x",), "author of book x"),
    "F": (Kind.RELATION, 2, ("x", "y"), "x is the author of book y"),
    "p": (Kind.CONSTANT, None, (), "the book principia mathematica"),
    "P": (Kind.RELATION, 1, ("x",), "x is the book principia mathematica"),
}


def book_attempt(names) -> Attempt:
    symbols = []
    for name in names:
        kind, arity, params, description = CANONICAL_BOOK[name]
        symbols.append(StudentSymbol(name, SymbolKind(kind, arity), params, description))
    return Attempt(tuple(symbols))


def check_book(book, names):
    return check_solution(map_attempt(book_attempt(names), book, GRAMMAR, DEFAULT_THRESHOLDS), book)


class TestBookCollection:
    def test_canonical_attempt_accepted(self, book):
        verdict = check_book(book, ["B", "A", "M", "L", "R", "f", "p"])
        assert verdict.status == ACCEPTED
        assert verdict.faults_fired == ()
        assert verdict.suggestions_fired == ()
        assert verdict.duplicates == ()

    def test_relation_for_constant_accepted_with_suggestion(self, book):
        verdict = check_book(book, ["B", "A", "M", "L", "R", "f", "P"])
        assert verdict.status == ACCEPTED
        assert len(verdict.suggestions_fired) == 1
        assert "use a constant" in verdict.suggestions_fired[0]

    def test_missing_type_relation_fires_fault(self, book):
        verdict = check_book(book, ["B", "M", "L", "R", "f", "p"])
        assert verdict.status == REJECTED_PHASE2
        assert len(verdict.faults_fired) == 1
        assert verdict.faults_fired[0].startswith("Think again about what types")

    def test_all_firing_faults_are_reported(self, book):
        verdict = check_book(book, ["B", "A", "f", "p"])
        assert verdict.status == REJECTED_PHASE2
        assert len(verdict.faults_fired) == 2
        assert "Principia Mathematica was written by" in verdict.faults_fired[0]
        assert "only refuted by books" in verdict.faults_fired[1]

    def test_duplicate_target_rejected(self, book):
        attempt = Attempt(
            (
                StudentSymbol("B1", SymbolKind(Kind.RELATION, 1), ("x",), "x is a book"),
                StudentSymbol("B2", SymbolKind(Kind.RELATION, 1), ("y",), "y is one of the books"),
                StudentSymbol("A", SymbolKind(Kind.RELATION, 1), ("x",), "x is an author"),
            )
        )
        verdict = check_solution(map_attempt(attempt, book, GRAMMAR, DEFAULT_THRESHOLDS), book)
        assert verdict.status == REJECTED_PHASE2
        assert verdict.duplicates == (("B", ("B1", "B2")),)
        assert verdict.faults_fired == ()

    def test_unmatched_symbol_rejected_in_phase_one(self, book):
        attempt = book_attempt(["B", "A"]).symbols + (
            StudentSymbol("S", SymbolKind(Kind.RELATION, 1), ("x",), "x is made of cheese"),
        )
        verdict = check_solution(
            map_attempt(Attempt(attempt), book, GRAMMAR, DEFAULT_THRESHOLDS), book
        )
        assert verdict.status == REJECTED_PHASE1
        feedback = dict(verdict.symbol_feedback)
        assert set(feedback) == {"S"}
        assert verdict.faults_fired == ()

    def test_redundant_pair_accepted_with_builtin_suggestion(self, book):
        verdict = check_book(book, ["B", "A", "M", "L", "R", "f", "F", "p"])
        assert verdict.status == ACCEPTED
        assert any("F, f" in text for text in verdict.suggestions_fired)

    def test_acceptance_matches_the_completeness_condition(self, book):
        # brute force over a slice of the subset lattice
        names = ["B", "A", "M", "L", "R", "f", "F", "p", "P"]
        ss = book.solution_set()
        for size in (6, 7):
            for subset in itertools.combinations(names, size):
                verdict = check_book(book, list(subset))
                assert (verdict.status == ACCEPTED) == ss.is_solution(set(subset)), subset


class TestLecture:
    def test_paraphrase_attempt_accepted(self, lecture):
        attempt = Attempt(
            (
                StudentSymbol("B", SymbolKind(Kind.PROPOSITION, None), (), "Bea visits the lecture on logic"),
                StudentSymbol("K", SymbolKind(Kind.PROPOSITION, None), (), "Kim attends the logic lecture"),
                StudentSymbol("W", SymbolKind(Kind.PROPOSITION, None), (), "Wim participates in the logic lecture"),
            )
        )
        verdict = check_solution(map_attempt(attempt, lecture, GRAMMAR, DEFAULT_THRESHOLDS), lecture)
        assert verdict.status == ACCEPTED
        assert verdict.suggestions_fired == ()

    def test_missing_friend_fires_fault(self, lecture):
        attempt = Attempt(
            (
                StudentSymbol("B", SymbolKind(Kind.PROPOSITION, None), (), "bea attends the logic lecture"),
                StudentSymbol("K", SymbolKind(Kind.PROPOSITION, None), (), "kim attends the logic lecture"),
            )
        )
        verdict = check_solution(map_attempt(attempt, lecture, GRAMMAR, DEFAULT_THRESHOLDS), lecture)
        assert verdict.status == REJECTED_PHASE2
        assert "lecture attendance of each of the three" in verdict.faults_fired[0]


def synthetic_mapping(spec, names):
    entries = []
    for name in names:
        potential = spec.symbol(name)
        student = StudentSymbol(
            f"s_{name}",
            potential.signature,
            tuple(f"x{i}" for i in range(potential.signature.placeholder_count)),
            potential.primary.text,
        )
        entries.append(MappingEntry(student, potential, Category.C1, 1.0, 1, potential.primary.permutation))
    return Mapping(tuple(entries))


class TestGenericIncompleteness:
    def test_generic_message_without_faults(self):
        symbols = tuple(
            PotentialSymbol(
                name,
                SymbolKind(Kind.PROPOSITION, None),
                (Description(f"the {name.lower()} happens", tokens=()),),
                None,
            )
            for name in ("D", "X")
        )
        spec = TaskSpec(
            task_id="bare",
            logic="propositional",
            scenario="",
            symbols=symbols,
            completeness=parse_condition("D ∧ X"),
        )
        verdict = check_solution(synthetic_mapping(spec, ["D"]), spec)
        assert verdict.status == REJECTED_PHASE2
        assert verdict.faults_fired == (INCOMPLETENESS_FEEDBACK,)

    def test_suggestions_never_block(self, book):
        verdict = check_solution(
            synthetic_mapping(book, ["B", "A", "M", "L", "R", "f", "F", "p", "P"]), book
        )
        assert verdict.status == ACCEPTED
        assert len(verdict.suggestions_fired) == 2  # both redundancy pairs present


class TestVerdictPayload:
    def test_shape_and_round_trip(self, book):
        verdict = check_book(book, ["B", "A", "M", "L", "R", "f", "P"])
        payload = verdict_payload(verdict)
        assert json.loads(json.dumps(payload)) == payload
        assert payload["status"] == "accepted"
        assert [row["name"] for row in payload["per_symbol"]] == ["B", "A", "M", "L", "R", "f", "P"]
        first = payload["per_symbol"][0]
        assert first == {
            "name": "B",
            "matched": "B",
            "category": "C1",
            "positive": True,
            "score": 1.0,
            "description_index": 1,
            "permutation": [1],
        }
        assert payload["duplicates"] == []
        assert payload["symbol_feedback"] == {}
        assert payload["mapping"] == {
            "B": "B", "A": "A", "M": "M", "L": "L", "R": "R", "f": "f", "P": "P",
        }

    def test_no_match_serializes_null(self, book):
        attempt = Attempt(
            (StudentSymbol("T", SymbolKind(Kind.RELATION, 3), ("x", "y", "z"), "x gives y to z"),)
        )
        verdict = check_solution(map_attempt(attempt, book, GRAMMAR, DEFAULT_THRESHOLDS), book)
        payload = verdict_payload(verdict)
        row = payload["per_symbol"][0]
        assert row["matched"] is None
        assert row["positive"] is False
        assert row["description_index"] is None
        assert row["permutation"] == []
        assert payload["status"] == "rejected_phase1"
        assert "mapping" not in payload  # only acceptance hands the mapping on


class TestAttemptFromPayload:
    def test_full_round_trip(self):
        attempt = attempt_from_payload(
            {
                "symbols": [
                    {"name": "B", "kind": "relation", "arity": 1,
                     "params": ["x"], "description": "x is a book"},
                    {"name": "p", "kind": "constant", "description": "peano's book"},
                ]
            }
        )
        assert [s.name for s in attempt.symbols] == ["B", "p"]
        assert attempt.symbols[0].signature == SymbolKind(Kind.RELATION, 1)
        assert attempt.symbols[0].canonical_description == "#1 is a book"

    def test_default_params_in_argument_order(self):
        attempt = attempt_from_payload(
            {
                "symbols": [
                    {"name": "F", "kind": "relation", "arity": 2,
                     "description": "u is the author of v"},
                ]
            }
        )
        assert attempt.symbols[0].params == ("u", "v")
        assert attempt.symbols[0].canonical_description == "#1 is the author of #2"

    @pytest.mark.parametrize(
        "payload",
        [
            [],
            {"symbols": {}},
            {"symbols": ["B"]},
            {"symbols": [{"kind": "relation", "arity": 1, "description": "d"}]},
            {"symbols": [{"name": " ", "kind": "constant", "description": "d"}]},
            {"symbols": [{"name": "B", "kind": "predicate", "description": "d"}]},
            {"symbols": [{"name": "B", "kind": "relation", "arity": "2", "description": "d"}]},
            {"symbols": [{"name": "B", "kind": "relation", "arity": 0, "description": "d"}]},
            {"symbols": [{"name": "B", "kind": "constant", "description": 7}]},
            {"symbols": [{"name": "B", "kind": "relation", "arity": 1, "params": [1], "description": "d"}]},
            {"symbols": [{"name": "B", "kind": "relation", "arity": 1, "params": ["u"], "description": "a book"}]},
            {"symbols": [
                {"name": "B", "kind": "constant", "description": "d"},
                {"name": "B", "kind": "constant", "description": "e"},
            ]},
        ],
    )
    def test_schema_violations(self, payload):
        with pytest.raises(BadPayload):
            attempt_from_payload(payload)


def test_evaluate_condition_reexported():
    condition = parse_condition("¬U")
    assert evaluate_condition(condition, {"B", "D"}) is True
