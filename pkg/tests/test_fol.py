"""Formula parsing, translation, and finite-model counting."""
import random

import pytest

from vocab_bridge.core import (
    Description,
    Kind,
    Mapping,
    MappingEntry,
    PotentialSymbol,
    StudentSymbol,
    SymbolKind,
    Category,
    TranslationTemplate,
)
from vocab_bridge.errors import (
    ArityError,
    FormulaSyntaxError,
    FreeVariable,
    MissingTranslation,
    TemplateNotQuantifierFree,
    TooLarge,
)
from vocab_bridge.fol import (
    And,
    Atom,
    Const,
    Eq,
    Exists,
    Forall,
    Func,
    Iff,
    Implies,
    Not,
    Or,
    Placeholder,
    Signature,
    Var,
    all_interpretations,
    enumerate_models,
    format_fo_formula,
    free_variables,
    holds,
    interpretation_space_size,
    parse_fo_formula,
    translate_atom,
    translate_formula,
)

BOOK_SIG = Signature(
    relations={"B": 1, "A": 1, "M": 1, "L": 1, "R": 2, "F": 2, "P": 1},
    functions={"f": 1},
    constants={"p"},
)


class TestParse:
    def test_quantified_implication(self):
        phi = parse_fo_formula("forall x. (P(x) -> L(x))", BOOK_SIG)
        assert phi == Forall("x", Implies(Atom("P", (Var("x"),)), Atom("L", (Var("x"),))))

    def test_unicode_spelling(self):
        assert parse_fo_formula("∀x. P(x)", BOOK_SIG) == parse_fo_formula(
            "forall x. P(x)", BOOK_SIG
        )
        assert parse_fo_formula("∃y. R(y, p)", BOOK_SIG) == parse_fo_formula(
            "exists y. R(y, p)", BOOK_SIG
        )

    def test_terms(self):
        phi = parse_fo_formula("x = f(p)", BOOK_SIG)
        assert phi == Eq(Var("x"), Func("f", (Const("p"),)))

    def test_dot_opens_maximal_scope(self):
        phi = parse_fo_formula("forall x. P(x) -> L(x)", BOOK_SIG)
        assert isinstance(phi, Forall)
        assert isinstance(phi.body, Implies)

    def test_quantifier_in_operand_needs_parens(self):
        phi = parse_fo_formula("(forall x. P(x)) -> L(p)", BOOK_SIG)
        assert isinstance(phi, Implies)
        assert isinstance(phi.left, Forall)

    def test_relation_arity_checked(self):
        with pytest.raises(ArityError):
            parse_fo_formula("R(x)", BOOK_SIG)

    def test_function_arity_checked(self):
        with pytest.raises(ArityError):
            parse_fo_formula("f(x, y) = x", BOOK_SIG)

    def test_relation_not_a_term(self):
        with pytest.raises(FormulaSyntaxError):
            parse_fo_formula("B(x) = p", BOOK_SIG)

    def test_placeholders_only_in_templates(self):
        with pytest.raises(FormulaSyntaxError):
            parse_fo_formula("#1 = p", BOOK_SIG)
        phi = parse_fo_formula("#1 = p", BOOK_SIG, allow_placeholders=True)
        assert phi == Eq(Placeholder(1), Const("p"))

    def test_zero_arity_relations_are_propositional_atoms(self):
        sig = Signature(relations={"K": 0, "W": 0}, functions={}, constants=set())
        assert parse_fo_formula("K ∧ W", sig) == And(Atom("K", ()), Atom("W", ()))

    def test_free_variables(self):
        phi = parse_fo_formula("forall x. R(x, y)", BOOK_SIG)
        assert free_variables(phi) == {"y"}


def _random_term(rng, depth):
    roll = rng.random()
    if depth == 0 or roll < 0.5:
        return Var(rng.choice(["x", "y", "z"]))
    if roll < 0.7:
        return Const("p")
    return Func("f", (_random_term(rng, depth - 1),))


def _random_formula(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.5:
            return Eq(_random_term(rng, 1), _random_term(rng, 1))
        name = rng.choice(["B", "L", "P"])
        return Atom(name, (_random_term(rng, 1),))
    shape = rng.randrange(7)
    sub = lambda: _random_formula(rng, depth - 1)
    if shape == 0:
        return Not(sub())
    if shape == 1:
        return And(sub(), sub())
    if shape == 2:
        return Or(sub(), sub())
    if shape == 3:
        return Implies(sub(), sub())
    if shape == 4:
        return Iff(sub(), sub())
    if shape == 5:
        return Forall(rng.choice(["x", "y", "z"]), sub())
    return Exists(rng.choice(["x", "y", "z"]), sub())


def test_round_trip_depth_five():
    rng = random.Random(23)
    for _ in range(300):
        phi = _random_formula(rng, 5)
        assert parse_fo_formula(format_fo_formula(phi), BOOK_SIG) == phi


def test_round_trip_examples():
    for text in [
        "∀x. (P(x) → L(x))",
        "∃x. (B(x) ∧ ¬L(x))",
        "∀x. ∀y. (R(x, y) → (L(x) ∧ L(y)))",
        "f(p) = f(f(p)) ∨ ¬(p = p)",
    ]:
        phi = parse_fo_formula(text, BOOK_SIG)
        assert parse_fo_formula(format_fo_formula(phi), BOOK_SIG) == phi


def _entry(student, potential, permutation=None):
    arity = potential.signature.placeholder_count
    return MappingEntry(
        student,
        potential,
        Category.C1,
        1.0,
        1,
        permutation or tuple(range(1, arity + 1)),
    )


P_REL = PotentialSymbol(
    "P",
    SymbolKind(Kind.RELATION, 1),
    (Description("u is the book principia mathematica", tokens=("u",)),),
    TranslationTemplate("#1 = p"),
)
F_REL = PotentialSymbol(
    "F",
    SymbolKind(Kind.RELATION, 2),
    (
        Description("u is the author of book v", tokens=("u", "v")),
        Description("book u was written by author v", tokens=("u", "v"), permutation=(2, 1)),
    ),
    TranslationTemplate("#1 = f(#2) ∧ B(#2)"),
)
L_REL = PotentialSymbol(
    "L", SymbolKind(Kind.RELATION, 1), (Description("book u deals with logic", tokens=("u",)),)
)


class TestTranslate:
    def test_template_instantiation(self):
        student = StudentSymbol(
            "P", SymbolKind(Kind.RELATION, 1), ("u",), "u is the book principia mathematica"
        )
        m = Mapping((_entry(student, P_REL),))
        out = translate_atom(Atom("P", (Var("x"),)), m, BOOK_SIG)
        assert out == Eq(Var("x"), Const("p"))

    def test_rename_without_template(self):
        student = StudentSymbol(
            "IsLogic", SymbolKind(Kind.RELATION, 1), ("u",), "book u deals with logic"
        )
        m = Mapping((_entry(student, L_REL),))
        out = translate_atom(Atom("IsLogic", (Var("x"),)), m, BOOK_SIG)
        assert out == Atom("L", (Var("x"),))

    def test_permuted_arguments(self):
        student = StudentSymbol(
            "F2", SymbolKind(Kind.RELATION, 2), ("a", "b"), "book a was written by author b"
        )
        m = Mapping((_entry(student, F_REL, permutation=(2, 1)),))
        out = translate_atom(Atom("F2", (Var("x"), Var("y"))), m, BOOK_SIG)
        assert out == And(
            Eq(Var("y"), Func("f", (Var("x"),))), Atom("B", (Var("x"),))
        )

    def test_whole_formula(self):
        student = StudentSymbol(
            "P", SymbolKind(Kind.RELATION, 1), ("u",), "u is the book principia mathematica"
        )
        logic = StudentSymbol(
            "IsLogic", SymbolKind(Kind.RELATION, 1), ("u",), "book u deals with logic"
        )
        m = Mapping((_entry(student, P_REL), _entry(logic, L_REL)))
        student_sig = Signature(
            relations={"P": 1, "IsLogic": 1}, functions={}, constants=set()
        )
        phi = parse_fo_formula("forall x. (P(x) -> IsLogic(x))", student_sig)
        out = translate_formula(phi, m, BOOK_SIG)
        assert out == Forall(
            "x", Implies(Eq(Var("x"), Const("p")), Atom("L", (Var("x"),)))
        )

    def test_unmatched_symbol_raises(self):
        student = StudentSymbol("Q", SymbolKind(Kind.RELATION, 1), ("u",), "u is odd")
        m = Mapping((MappingEntry(student, None, Category.C5, 0.0),))
        with pytest.raises(MissingTranslation):
            translate_atom(Atom("Q", (Var("x"),)), m, BOOK_SIG)

    def test_quantified_template_gated_and_capture_avoided(self):
        owner = PotentialSymbol(
            "HasAuthor",
            SymbolKind(Kind.RELATION, 1),
            (Description("book u has an author", tokens=("u",)),),
            TranslationTemplate("exists x. F(x, #1)"),
        )
        student = StudentSymbol(
            "HasAuthor", SymbolKind(Kind.RELATION, 1), ("u",), "book u has an author"
        )
        m = Mapping((_entry(student, owner),))
        atom = Atom("HasAuthor", (Var("x"),))
        with pytest.raises(TemplateNotQuantifierFree):
            translate_atom(atom, m, BOOK_SIG)
        out = translate_atom(atom, m, BOOK_SIG, allow_quantified_templates=True)
        # The template's own x must be renamed away from the argument x.
        assert isinstance(out, Exists)
        assert out.var != "x"
        assert out.body == Atom("F", (Var(out.var), Var("x")))


class TestModels:
    def test_every_element_self_equal(self):
        sig = Signature(relations={}, functions={}, constants=set())
        phi = parse_fo_formula("forall x. x = x", sig)
        assert enumerate_models(sig, phi, 1) == 1

    def test_unary_relation_pinned_to_constant(self):
        sig = Signature(relations={"P": 1}, functions={}, constants={"p"})
        phi = parse_fo_formula("forall x. (P(x) <-> x = p)", sig)
        # P must be exactly {p}: one choice of P per choice of p.
        assert enumerate_models(sig, phi, 2) == 2
        assert enumerate_models(sig, phi, 3) == 3

    def test_space_size(self):
        sig = Signature(relations={"R": 2}, functions={"f": 1}, constants={"c"})
        assert interpretation_space_size(sig, 2) == (2**4) * (2**2) * 2

    def test_too_large(self):
        sig = Signature(relations={"R": 2}, functions={}, constants=set())
        with pytest.raises(TooLarge):
            enumerate_models(sig, parse_fo_formula("forall x. R(x, x)", sig), 5)

    def test_free_variable_rejected(self):
        sig = Signature(relations={"P": 1}, functions={}, constants=set())
        with pytest.raises(FreeVariable):
            enumerate_models(sig, parse_fo_formula("P(y)", sig), 2)

    def test_interpretation_count_matches_space(self):
        sig = Signature(relations={"P": 1}, functions={"f": 1}, constants={"c"})
        interps = list(all_interpretations(sig, 2))
        assert len(interps) == interpretation_space_size(sig, 2) == 4 * 4 * 2

    def test_shadowed_binding_survives_sibling(self):
        sig = Signature(relations={"Q": 1}, functions={}, constants=set())
        phi = parse_fo_formula("forall x. ((exists x. Q(x)) ∨ Q(x))", sig)
        # Equivalent to: exists x. Q(x); satisfied by 3 of 4 interpretations.
        assert enumerate_models(sig, phi, 2) == 3

    def test_holds_with_explicit_environment(self):
        sig = Signature(relations={"P": 1}, functions={}, constants=set())
        phi = parse_fo_formula("P(y)", sig)
        interp = {"P": frozenset({(1,)})}
        assert holds(phi, interp, 2, {"y": 1})
        assert not holds(phi, interp, 2, {"y": 0})
        with pytest.raises(FreeVariable):
            holds(phi, interp, 2)

    def test_function_semantics(self):
        sig = Signature(relations={}, functions={"f": 1}, constants=set())
        phi = parse_fo_formula("forall x. f(x) = x", sig)
        # Identity is the only fixpoint-everywhere function.
        assert enumerate_models(sig, phi, 3) == 1
