"""Boolean condition language over symbol names.

Used for completeness conditions, fault triggers and suggestion triggers.
Connectives come in a Unicode and an ASCII spelling (¬/!, ∧/&&, ∨/||, →/->,
↔/<->); precedence is ¬ > ∧ > ∨ > → > ↔ with → right-associative.
Conjunction and disjunction are variadic: ``a ∧ b ∧ c`` is one three-child
node, which keeps long completeness conditions flat.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Union

from .errors import ConditionSyntaxError


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Not:
    child: "Condition"


@dataclass(frozen=True)
class And:
    children: tuple["Condition", ...]

    def __post_init__(self) -> None:
        assert len(self.children) >= 2


@dataclass(frozen=True)
class Or:
    children: tuple["Condition", ...]

    def __post_init__(self) -> None:
        assert len(self.children) >= 2


@dataclass(frozen=True)
class Implies:
    left: "Condition"
    right: "Condition"


@dataclass(frozen=True)
class Iff:
    left: "Condition"
    right: "Condition"


Condition = Union[Var, Not, And, Or, Implies, Iff]

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><->|->|&&|\|\||[!()¬∧∨→↔]))"
)

# Map every spelling onto one canonical operator token.
_CANON = {
    "!": "not", "¬": "not",
    "&&": "and", "∧": "and",
    "||": "or", "∨": "or",
    "->": "implies", "→": "implies",
    "<->": "iff", "↔": "iff",
}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ConditionSyntaxError(pos, "a symbol name or connective")
        if m.group("name"):
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            op = m.group("op")
            tokens.append((_CANON.get(op, op), op, m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self, kind: str) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        if tok[0] != kind:
            raise ConditionSyntaxError(tok[2], kind)
        self.i += 1
        return tok

    def parse(self) -> Condition:
        node = self.iff()
        tok = self.peek()
        if tok[0] != "end":
            raise ConditionSyntaxError(tok[2], "end of input")
        return node

    def iff(self) -> Condition:
        node = self.implies()
        while self.peek()[0] == "iff":
            self.take("iff")
            node = Iff(node, self.implies())
        return node

    def implies(self) -> Condition:
        node = self.disjunction()
        if self.peek()[0] == "implies":
            self.take("implies")
            return Implies(node, self.implies())  # right-associative
        return node

    def disjunction(self) -> Condition:
        parts = [self.conjunction()]
        while self.peek()[0] == "or":
            self.take("or")
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self) -> Condition:
        parts = [self.unary()]
        while self.peek()[0] == "and":
            self.take("and")
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> Condition:
        kind, text, pos = self.peek()
        if kind == "not":
            self.take("not")
            return Not(self.unary())
        if kind == "(":
            self.take("(")
            node = self.iff()
            self.take(")")
            return node
        if kind == "name":
            self.take("name")
            return Var(text)
        raise ConditionSyntaxError(pos, "a symbol name, '¬' or '('")


def parse_condition(text: str) -> Condition:
    """Parse condition text into an AST; raises ConditionSyntaxError."""
    return _Parser(text).parse()


def evaluate_condition(condition: Condition, present: Iterable[str]) -> bool:
    """Truth of a condition when exactly the given names count as included."""
    names = present if isinstance(present, (set, frozenset)) else set(present)

    def ev(node: Condition) -> bool:
        if isinstance(node, Var):
            return node.name in names
        if isinstance(node, Not):
            return not ev(node.child)
        if isinstance(node, And):
            return all(ev(c) for c in node.children)
        if isinstance(node, Or):
            return any(ev(c) for c in node.children)
        if isinstance(node, Implies):
            return (not ev(node.left)) or ev(node.right)
        if isinstance(node, Iff):
            return ev(node.left) == ev(node.right)
        raise TypeError(f"not a condition node: {node!r}")

    return ev(condition)


def condition_names(condition: Condition) -> set[str]:
    """All symbol names a condition mentions."""
    if isinstance(condition, Var):
        return {condition.name}
    if isinstance(condition, Not):
        return condition_names(condition.child)
    if isinstance(condition, (And, Or)):
        out: set[str] = set()
        for c in condition.children:
            out |= condition_names(c)
        return out
    if isinstance(condition, (Implies, Iff)):
        return condition_names(condition.left) | condition_names(condition.right)
    raise TypeError(f"not a condition node: {condition!r}")


_LEVEL = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5, Var: 6}


def format_condition(condition: Condition) -> str:
    """Pretty-print with Unicode connectives and minimal parentheses.

    parse_condition(format_condition(c)) reproduces c exactly.
    """

    def fmt(node: Condition, min_level: int) -> str:
        level = _LEVEL[type(node)]
        if isinstance(node, Var):
            text = node.name
        elif isinstance(node, Not):
            text = "¬" + fmt(node.child, level)
        elif isinstance(node, And):
            # Children strictly tighter: a nested And node would otherwise be
            # flattened into its parent on reparse.
            text = " ∧ ".join(fmt(c, level + 1) for c in node.children)
        elif isinstance(node, Or):
            text = " ∨ ".join(fmt(c, level + 1) for c in node.children)
        elif isinstance(node, Implies):
            # Right-associative: the right operand may repeat the level.
            text = f"{fmt(node.left, level + 1)} → {fmt(node.right, level)}"
        else:
            # Left-associative: the left operand may repeat the level.
            text = f"{fmt(node.left, level)} ↔ {fmt(node.right, level + 1)}"
        return f"({text})" if level < min_level else text

    return fmt(condition, 0)
