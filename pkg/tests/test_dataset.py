"""Dataset generation: pairing, cross pairs, dedup, split, serialization.

The pairing oracle below rebuilds the expected pair set with plain loops over
the enumerated grammar languages, and the split oracle replays the seeded
assignment by definition.  generate_dataset must agree with both exactly.
"""
import itertools
import random

import pytest

from vocab_bridge.core import (
    Category,
    Description,
    Kind,
    POSITIVE_CATEGORIES,
    PotentialSymbol,
    SymbolKind,
)
from vocab_bridge.conditions import parse_condition
from vocab_bridge.dataset import (
    LabeledPair,
    generate_dataset,
    read_dataset,
    write_dataset,
)
from vocab_bridge.errors import MissingGrammar, VocabBridgeError
from vocab_bridge.grammar import enumerate_derivations, parse_grammar
from vocab_bridge.taskspec import TaskSpec, parse_task_spec

from test_grammar import UI_GRAMMAR
from test_taskspec import FIXTURES


def proposition(name: str, text: str) -> PotentialSymbol:
    return PotentialSymbol(
        name, SymbolKind(Kind.PROPOSITION, None), (Description(text, tokens=()),), None
    )


def ui_spec(extra_symbols=(), grammars=None) -> TaskSpec:
    symbols = (proposition("D", "the user interface works correctly"), *extra_symbols)
    condition = parse_condition(" ∧ ".join(s.name for s in symbols))
    spec_grammars = {("D", 1, Category.C1): parse_grammar(UI_GRAMMAR)}
    if grammars:
        spec_grammars.update(grammars)
    return TaskSpec(
        task_id="ui",
        logic="propositional",
        scenario="a scenario",
        symbols=symbols,
        completeness=condition,
        grammars=spec_grammars,
    )


def split_by_definition(descriptions, seed, eval_fraction):
    rng = random.Random(seed)
    shuffled = sorted(descriptions)
    rng.shuffle(shuffled)
    return {d: "eval" if rng.random() < eval_fraction else "train" for d in shuffled}


UI_LANGUAGE = [
    " ".join(words)
    for words in itertools.product(
        ("user interface", "user-interface", "ui"),
        ("works", "is working", "behaves", "is behaving"),
        ("correctly", "properly"),
    )
]


class TestGenerateDataset:
    def test_single_symbol_counts(self):
        pairs = generate_dataset(ui_spec(), seed=42, eval_fraction=0.2, cross_pair=False)
        assert len(pairs) == 24
        assert {p.d for p in pairs} == set(UI_LANGUAGE)
        assert {p.d_star for p in pairs} == {"the user interface works correctly"}
        assert {p.category for p in pairs} == {Category.C1}

    def test_seeded_split_matches_definition(self):
        pairs = generate_dataset(ui_spec(), seed=42, eval_fraction=0.2, cross_pair=False)
        expected = split_by_definition({p.d for p in pairs}, 42, 0.2)
        assert {p.d: p.split for p in pairs} == expected
        # frozen from the by-definition split oracle at seed 42
        assert sum(p.split == "eval" for p in pairs) == 4

    def test_cross_pair_adds_c5_for_the_unrelated_symbol(self):
        spec = ui_spec(extra_symbols=(proposition("X", "the printer prints"),))
        without = generate_dataset(spec, seed=42, eval_fraction=0.2, cross_pair=False)
        with_cross = generate_dataset(spec, seed=42, eval_fraction=0.2, cross_pair=True)
        added = [p for p in with_cross if p not in without]
        assert len(with_cross) == len(without) + 24
        assert all(p.category is Category.C5 for p in added)
        assert all(p.symbol == "X" and p.d_star == "the printer prints" for p in added)

    def test_cross_pair_skips_strings_the_target_also_generates(self):
        # the second symbol's C1 grammar shares the "ui" strings
        shared = parse_grammar("S -> ui works correctly | the printer prints")
        spec = ui_spec(
            extra_symbols=(proposition("X", "the printer prints"),),
            grammars={("X", 1, Category.C1): shared},
        )
        pairs = generate_dataset(spec, seed=1, eval_fraction=0.5, cross_pair=True)
        crossed_to_x = [p for p in pairs if p.symbol == "X" and p.category is Category.C5]
        assert "ui works correctly" not in {p.d for p in crossed_to_x}
        assert "ui works properly" in {p.d for p in crossed_to_x}
        # the shared string keeps its grammar-sourced positive label
        kept = [p for p in pairs if p.symbol == "X" and p.d == "ui works correctly"]
        assert [p.category for p in kept] == [Category.C1]

    def test_eval_fraction_bounds(self):
        for bad in (0.0, 1.0, -0.1):
            with pytest.raises(VocabBridgeError):
                generate_dataset(ui_spec(), seed=1, eval_fraction=bad)

    def test_missing_grammar(self):
        spec = TaskSpec(
            task_id="bare",
            logic="propositional",
            scenario="",
            symbols=(proposition("D", "something happens"),),
            completeness=parse_condition("D"),
        )
        with pytest.raises(MissingGrammar):
            generate_dataset(spec, seed=1, eval_fraction=0.2)

    def test_grammarless_symbols_are_fine_if_any_positive_grammar_exists(self):
        spec = ui_spec(extra_symbols=(proposition("X", "the printer prints"),))
        generate_dataset(spec, seed=1, eval_fraction=0.2, cross_pair=True)

    def test_deterministic(self):
        first = generate_dataset(ui_spec(), seed=9, eval_fraction=0.2)
        second = generate_dataset(ui_spec(), seed=9, eval_fraction=0.2)
        assert first == second


@pytest.fixture(scope="module")
def book():
    doc = (FIXTURES / "book_collection.xml").read_text(encoding="utf-8")
    return parse_task_spec(doc, base_dir=FIXTURES)


def book_pairs_by_definition(spec):
    """Expected (d, d_star, symbol) -> category, rebuilt with plain loops."""
    languages = {key: enumerate_derivations(g) for key, g in spec.grammars.items()}
    expected = {}
    for symbol in spec.symbols:
        for desc_index, description in enumerate(symbol.descriptions, 1):
            for category in sorted(Category, key=lambda c: c.rank):
                for d in languages.get((symbol.name, desc_index, category), []):
                    key = (d, description.canonical, symbol.name)
                    if key not in expected:
                        expected[key] = category
    for source in spec.symbols:
        source_strings = sorted(
            {
                d
                for (name, _, category), strings in languages.items()
                if name == source.name and category in POSITIVE_CATEGORIES
                for d in strings
            }
        )
        for target in spec.symbols:
            if target.name == source.name:
                continue
            accepted_by_target = [
                grammar
                for (name, _, category), grammar in spec.grammars.items()
                if name == target.name and category in POSITIVE_CATEGORIES
            ]
            for d in source_strings:
                if any(g.accepts(d) for g in accepted_by_target):
                    continue
                key = (d, target.primary.canonical, target.name)
                if key not in expected:
                    expected[key] = Category.C5
    return expected


class TestBookCollectionDataset:
    def test_matches_the_pairing_oracle(self, book):
        pairs = generate_dataset(book, seed=42, eval_fraction=0.2, cross_pair=True)
        got = {(p.d, p.d_star, p.symbol): p.category for p in pairs}
        assert got == book_pairs_by_definition(book)

    def test_positive_pair_count_frozen(self, book):
        pairs = generate_dataset(book, seed=42, eval_fraction=0.2, cross_pair=False)
        # sum of the twelve grammar language sizes in the fixture
        assert len(pairs) == 116

    def test_every_positive_pair_is_accepted_by_some_positive_grammar(self, book):
        pairs = generate_dataset(book, seed=3, eval_fraction=0.2, cross_pair=True)
        for pair in pairs:
            if pair.category not in POSITIVE_CATEGORIES:
                continue
            grammars = [
                g
                for (name, _, category), g in book.grammars.items()
                if name == pair.symbol and category is pair.category
            ]
            assert any(g.accepts(pair.d) for g in grammars), pair

    def test_no_description_leaks_across_splits(self, book):
        pairs = generate_dataset(book, seed=5, eval_fraction=0.3, cross_pair=True)
        splits_per_d = {}
        for p in pairs:
            splits_per_d.setdefault(p.d, set()).add(p.split)
        assert all(len(s) == 1 for s in splits_per_d.values())


class TestSerialization:
    def test_round_trip_and_trailing_newline(self, tmp_path, book):
        pairs = generate_dataset(book, seed=42, eval_fraction=0.2, cross_pair=True)
        target = tmp_path / "book.jsonl"
        write_dataset(pairs, target)
        raw = target.read_bytes()
        assert raw.endswith(b"\n")
        assert read_dataset(target) == pairs

    def test_byte_determinism(self, tmp_path, book):
        first, second = tmp_path / "one.jsonl", tmp_path / "two.jsonl"
        write_dataset(generate_dataset(book, seed=42, eval_fraction=0.2), first)
        write_dataset(generate_dataset(book, seed=42, eval_fraction=0.2), second)
        assert first.read_bytes() == second.read_bytes()

    def test_record_shape(self, tmp_path):
        target = tmp_path / "tiny.jsonl"
        write_dataset(
            [LabeledPair("a b", "c", "S", Category.C2, "train")],
            target,
        )
        assert (
            target.read_text(encoding="utf-8")
            == '{"d": "a b", "d_star": "c", "symbol": "S", "category": "C2", "split": "train"}\n'
        )

    def test_bad_record_raises(self, tmp_path):
        target = tmp_path / "bad.jsonl"
        target.write_text('{"d": "a"}\n', encoding="utf-8")
        with pytest.raises(VocabBridgeError):
            read_dataset(target)

    def test_bad_split_rejected(self):
        with pytest.raises(VocabBridgeError):
            LabeledPair("a", "b", "S", Category.C1, "test")
