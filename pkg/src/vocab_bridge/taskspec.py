"""Task documents: the XML dialect, solution sets, and spec validation.

A task bundles a scenario text, the solution vocabulary with graded
description grammars, a completeness condition, fault rules (blocking) and
suggestion rules (advisory), and redundancy sets.  The solution space is kept
intensionally: a vocabulary subset is a solution exactly when it satisfies
the completeness condition.
"""
from __future__ import annotations

import itertools
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .conditions import Condition, condition_names, evaluate_condition, parse_condition
from .core import (
    Category,
    Description,
    Kind,
    PotentialSymbol,
    SymbolKind,
    TranslationTemplate,
    parameter_tokens,
)
from .errors import (
    BadPermutation,
    DuplicateSymbol,
    UnknownSymbol,
    VocabBridgeError,
    XmlError,
)
from . import fol
from .fol import Placeholder, Signature, parse_fo_formula
from .grammar import Grammar, parse_grammar

GrammarKey = tuple[str, int, Category]


@dataclass(frozen=True)
class FeedbackRule:
    """A fault or suggestion: fires when its condition holds."""

    when: Condition
    text: str


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


class SolutionSet:
    """The admissible vocabulary subsets, represented by the completeness condition.

    Membership is intensional (condition satisfaction).  The explicit
    enumeration additionally drops subsets carrying more than one member of a
    redundancy set: alternatives are interchangeable, and listing each
    combination of them would not add admissible vocabularies, only padded
    variants of the same ones.
    """

    def __init__(
        self,
        names: tuple[str, ...],
        completeness: Condition,
        redundancies: tuple[frozenset[str], ...] = (),
    ) -> None:
        self.names = names
        self.completeness = completeness
        self.redundancies = redundancies

    def is_solution(self, present: set[str]) -> bool:
        return evaluate_condition(self.completeness, present)

    def members(self) -> list[frozenset[str]]:
        if len(self.names) > 20:
            raise VocabBridgeError("explicit enumeration capped at 20 symbols")
        out = []
        for size in range(len(self.names) + 1):
            for combo in itertools.combinations(self.names, size):
                subset = frozenset(combo)
                if not self.is_solution(set(subset)):
                    continue
                if any(len(subset & r) > 1 for r in self.redundancies):
                    continue
                out.append(subset)
        return out


@dataclass
class TaskSpec:
    """Everything the engine needs to grade attempts at one task."""

    task_id: str
    logic: str
    scenario: str
    symbols: tuple[PotentialSymbol, ...]
    completeness: Condition
    faults: tuple[FeedbackRule, ...] = ()
    suggestions: tuple[FeedbackRule, ...] = ()
    redundancies: tuple[frozenset[str], ...] = ()
    grammars: dict[GrammarKey, Grammar] = field(default_factory=dict)
    pending_grammars: dict[GrammarKey, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for s in self.symbols:
            if s.name in seen:
                raise DuplicateSymbol(s.name)
            seen.add(s.name)

    def symbol(self, name: str) -> PotentialSymbol:
        for s in self.symbols:
            if s.name == name:
                return s
        raise UnknownSymbol(name)

    def declaration_index(self, name: str) -> int:
        for i, s in enumerate(self.symbols):
            if s.name == name:
                return i
        raise UnknownSymbol(name)

    def grammar_for(self, name: str, description_index: int, category: Category) -> Optional[Grammar]:
        return self.grammars.get((name, description_index, category))

    def solution_set(self) -> SolutionSet:
        return SolutionSet(
            tuple(s.name for s in self.symbols), self.completeness, self.redundancies
        )

    def signature(self) -> Signature:
        """The task vocabulary as a formula signature (propositions are 0-ary)."""
        relations: dict[str, int] = {}
        functions: dict[str, int] = {}
        constants: set[str] = set()
        for s in self.symbols:
            if s.signature.kind is Kind.RELATION:
                relations[s.name] = s.signature.arity or 0
            elif s.signature.kind is Kind.PROPOSITION:
                relations[s.name] = 0
            elif s.signature.kind is Kind.FUNCTION:
                functions[s.name] = s.signature.arity or 0
            else:
                constants.add(s.name)
        return Signature(relations=relations, functions=functions, constants=constants)


_KIND_TAGS = {
    "Proposition": Kind.PROPOSITION,
    "Relation": Kind.RELATION,
    "Function": Kind.FUNCTION,
    "Constant": Kind.CONSTANT,
}

_LOGICS = ("propositional", "first-order")


def _parse_arity(element: ET.Element, kind: Kind) -> Optional[int]:
    raw = element.get("arity")
    if kind in (Kind.RELATION, Kind.FUNCTION):
        if raw is None:
            raise XmlError(f"<{element.tag}> needs an arity attribute")
        try:
            arity = int(raw)
        except ValueError:
            raise XmlError(f"arity {raw!r} is not an integer")
        if arity < 1:
            raise XmlError(f"<{element.tag}> arity must be at least 1")
        return arity
    if raw is not None and int(raw) != 0:
        raise XmlError(f"<{element.tag}> cannot carry arity {raw}")
    return None


def _parse_permutation(raw: str, tokens: tuple[str, ...]) -> tuple[int, ...]:
    parts = [p.strip() for p in raw.split(",")]
    if all(re.fullmatch(r"\d+", p) for p in parts):
        return tuple(int(p) for p in parts)
    try:
        # Token form: slot i plays the role of the named canonical parameter.
        return tuple(tokens.index(p) + 1 for p in parts)
    except ValueError:
        raise BadPermutation(f"permutation {raw!r} names unknown parameter tokens")


def _template_with_placeholders(text: str, tokens: tuple[str, ...]) -> str:
    """Rewrite canonical parameter tokens inside a template to #i markers."""
    out = text
    for i, tok in sorted(enumerate(tokens, 1), key=lambda kv: -len(kv[1])):
        out = re.sub(rf"(?<![\w#]){re.escape(tok)}(?![\w])", f"#{i}", out)
    return out


def _parse_symbol(
    element: ET.Element,
    grammars_out: list[tuple[str, int, Category, str]],
) -> PotentialSymbol:
    kind = _KIND_TAGS[element.tag]
    name = element.get("symbol")
    if not name:
        raise XmlError(f"<{element.tag}> needs a symbol attribute")
    arity = _parse_arity(element, kind)
    signature = SymbolKind(kind, arity)
    tokens = parameter_tokens(signature.placeholder_count)

    descriptions: list[Description] = []
    translation: Optional[TranslationTemplate] = None
    for child in element:
        if child.tag == "Description":
            text = (child.text or "").strip()
            if not text:
                raise XmlError(f"symbol {name!r}: empty <Description>")
            permutation: tuple[int, ...] = ()
            raw_perm = child.get("permutation")
            if raw_perm is not None:
                permutation = _parse_permutation(raw_perm, tokens)
            descriptions.append(Description(text, tokens=tokens, permutation=permutation))
        elif child.tag == "Translation":
            text = (child.text or "").strip()
            if not text:
                raise XmlError(f"symbol {name!r}: empty <Translation>")
            translation = TranslationTemplate(_template_with_placeholders(text, tokens))
        elif child.tag == "Grammar":
            raw_cat = child.get("category")
            if raw_cat not in Category._value2member_map_:
                raise XmlError(f"symbol {name!r}: bad grammar category {raw_cat!r}")
            src = child.get("src")
            if not src:
                raise XmlError(f"symbol {name!r}: <Grammar> needs a src attribute")
            index = int(child.get("for", "1"))
            grammars_out.append((name, index, Category(raw_cat), src))
        else:
            raise XmlError(f"symbol {name!r}: unexpected element <{child.tag}>")
    if not descriptions:
        raise XmlError(f"symbol {name!r} needs at least one <Description>")
    return PotentialSymbol(name, signature, tuple(descriptions), translation)


def _prose(element: ET.Element) -> str:
    # Feedback and scenario bodies may carry presentational child elements
    # (block quotes and the like); keep the words, flatten the whitespace.
    return " ".join("".join(element.itertext()).split())


def _parse_rules(parent: Optional[ET.Element], tag: str) -> tuple[FeedbackRule, ...]:
    if parent is None:
        return ()
    rules = []
    for child in parent:
        if child.tag != tag:
            raise XmlError(f"unexpected element <{child.tag}> in <{parent.tag}>")
        when = child.get("when")
        if not when:
            raise XmlError(f"<{tag}> needs a when attribute")
        rules.append(FeedbackRule(parse_condition(when), _prose(child)))
    return tuple(rules)


def parse_task_spec(document: str, base_dir: Optional[Path | str] = None) -> TaskSpec:
    """Parse a task document; grammar files resolve relative to base_dir.

    Grammar references that cannot be resolved (no base_dir, or no such file)
    are recorded as pending rather than failing the parse.
    """
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        raise XmlError(f"not well-formed: {exc}") from exc
    if root.tag != "Task":
        raise XmlError(f"root element must be <Task>, got <{root.tag}>")
    task_id = root.get("id")
    if not task_id:
        raise XmlError("<Task> needs an id attribute")
    logic = root.get("logic")
    if logic not in _LOGICS:
        raise XmlError(f"logic must be one of {_LOGICS}, got {logic!r}")

    scenario = ""
    symbols: list[PotentialSymbol] = []
    grammar_refs: list[tuple[str, int, Category, str]] = []
    faults: tuple[FeedbackRule, ...] = ()
    suggestions: tuple[FeedbackRule, ...] = ()
    completeness: Optional[Condition] = None
    redundancies: list[frozenset[str]] = []

    for child in root:
        if child.tag == "Scenario":
            scenario = _prose(child)
        elif child.tag == "Symbols":
            for sym in child:
                if sym.tag not in _KIND_TAGS:
                    raise XmlError(f"unexpected element <{sym.tag}> in <Symbols>")
                symbols.append(_parse_symbol(sym, grammar_refs))
        elif child.tag == "Faults":
            faults = _parse_rules(child, "Fault")
        elif child.tag == "Suggestions":
            suggestions = _parse_rules(child, "Suggestion")
        elif child.tag == "CompletenessCondition":
            completeness = parse_condition((child.text or "").strip())
        elif child.tag == "Redundancies":
            for entry in child:
                if entry.tag != "Set":
                    raise XmlError(f"unexpected element <{entry.tag}> in <Redundancies>")
                members = frozenset(
                    p.strip() for p in (entry.text or "").split(",") if p.strip()
                )
                redundancies.append(members)
        else:
            raise XmlError(f"unexpected element <{child.tag}> in <Task>")

    if completeness is None:
        raise XmlError("<Task> needs a <CompletenessCondition>")

    spec = TaskSpec(
        task_id=task_id,
        logic=logic,
        scenario=scenario,
        symbols=tuple(symbols),
        completeness=completeness,
        faults=faults,
        suggestions=suggestions,
        redundancies=tuple(redundancies),
    )

    declared = {s.name for s in spec.symbols}
    for condition in _spec_conditions(spec):
        for name in condition_names(condition):
            if name not in declared:
                raise UnknownSymbol(name)
    for group in spec.redundancies:
        for name in group:
            if name not in declared:
                raise UnknownSymbol(name)

    for name, index, category, src in grammar_refs:
        owner = spec.symbol(name)
        if not 1 <= index <= len(owner.descriptions):
            raise XmlError(
                f"symbol {name!r}: grammar for={index} does not name one of its "
                f"{len(owner.descriptions)} descriptions"
            )
        key = (name, index, category)
        if key in spec.grammars or key in spec.pending_grammars:
            raise XmlError(f"symbol {name!r}: duplicate grammar for {category.value}")
        path = Path(base_dir, src) if base_dir is not None else None
        if path is not None and path.is_file():
            spec.grammars[key] = parse_grammar(path.read_text(encoding="utf-8"))
        else:
            spec.pending_grammars[key] = src
    return spec


def _spec_conditions(spec: TaskSpec):
    yield spec.completeness
    for rule in spec.faults:
        yield rule.when
    for rule in spec.suggestions:
        yield rule.when


def validate_spec(spec: TaskSpec) -> list[Diagnostic]:
    """Non-fatal checks; an empty list means the spec is coherent."""
    out: list[Diagnostic] = []
    declared = {s.name for s in spec.symbols}

    for condition in _spec_conditions(spec):
        for name in sorted(condition_names(condition) - declared):
            out.append(Diagnostic("UnknownSymbol", f"condition references {name!r}"))
    for group in spec.redundancies:
        for name in sorted(group - declared):
            out.append(Diagnostic("UnknownSymbol", f"redundancy set references {name!r}"))
        if len(group) < 2:
            listed = ", ".join(sorted(group)) or "(empty)"
            out.append(
                Diagnostic("RedundancySetTooSmall", f"redundancy set {{{listed}}} needs two members")
            )

    if not any(d.code == "UnknownSymbol" for d in out) and len(declared) <= 20:
        if not any(
            evaluate_condition(spec.completeness, set(combo))
            for size in range(len(spec.symbols) + 1)
            for combo in itertools.combinations(declared, size)
        ):
            out.append(Diagnostic("Unsatisfiable", "no vocabulary subset is a solution"))

    signature = spec.signature()
    for s in spec.symbols:
        if s.translation is None:
            continue
        try:
            template = parse_fo_formula(s.translation.text, signature, allow_placeholders=True)
        except VocabBridgeError as exc:
            out.append(Diagnostic("BadTemplate", f"symbol {s.name!r}: {exc}"))
            continue
        arity = s.signature.placeholder_count
        for index in sorted(_placeholder_indices(template)):
            if not 1 <= index <= arity:
                out.append(
                    Diagnostic(
                        "TemplatePlaceholderOutOfRange",
                        f"symbol {s.name!r}: template uses #{index}, arity is {arity}",
                    )
                )
    return out


def _placeholder_indices(phi) -> set[int]:
    out: set[int] = set()

    def walk_term(t) -> None:
        if isinstance(t, Placeholder):
            out.add(t.index)
        elif isinstance(t, fol.Func):
            for a in t.args:
                walk_term(a)

    def walk(node) -> None:
        if isinstance(node, fol.Atom):
            for a in node.args:
                walk_term(a)
        elif isinstance(node, fol.Eq):
            walk_term(node.left)
            walk_term(node.right)
        elif isinstance(node, fol.Not):
            walk(node.child)
        elif isinstance(node, (fol.And, fol.Or, fol.Implies, fol.Iff)):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, (fol.Forall, fol.Exists)):
            walk(node.body)

    walk(phi)
    return out
