"""First-order formulas: parsing, translation along a mapping, finite models.

Student formulas are written over the student's own vocabulary; translation
rewrites them over the canonical one, applying the argument permutation the
matcher recorded and instantiating per-symbol translation templates.  The
finite-model counter exists to make translation claims checkable: a sound
translation preserves model counts once the defining axioms of the translated
symbols are conjoined.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Mapping as TMapping, Optional, Union

from .core import Kind, Mapping
from .errors import (
    ArityError,
    FormulaSyntaxError,
    FreeVariable,
    MissingTranslation,
    TemplateNotQuantifierFree,
    TooLarge,
    UnknownSymbol,
)

# --------------------------------------------------------------------------
# Terms and formulas


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Func:
    name: str
    args: tuple["Term", ...]


@dataclass(frozen=True)
class Placeholder:
    """#i argument slot inside a translation template."""

    index: int


Term = Union[Var, Const, Func, Placeholder]


@dataclass(frozen=True)
class Atom:
    name: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[Atom, Eq, Not, And, Or, Implies, Iff, Forall, Exists]


@dataclass(frozen=True)
class Signature:
    """Non-logical vocabulary: relation and function arities plus constants."""

    relations: TMapping[str, int]
    functions: TMapping[str, int]
    constants: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "relations", dict(self.relations))
        object.__setattr__(self, "functions", dict(self.functions))
        object.__setattr__(self, "constants", frozenset(self.constants))
        names = list(self.relations) + list(self.functions) + list(self.constants)
        if len(set(names)) != len(names):
            raise ArityError("signature declares a name with two roles")


# --------------------------------------------------------------------------
# Parser

_F_TOKEN_RE = re.compile(
    r"\s*(?:(?P<marker>#\d+)"
    r"|(?P<word>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><->|->|&&|\|\||[!()=,.¬∧∨→↔∀∃]))"
)

_F_CANON = {
    "!": "not", "¬": "not",
    "&&": "and", "∧": "and",
    "||": "or", "∨": "or",
    "->": "implies", "→": "implies",
    "<->": "iff", "↔": "iff",
    "∀": "forall", "∃": "exists",
}
_KEYWORDS = {"forall": "forall", "exists": "exists"}


def _f_tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _F_TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise FormulaSyntaxError(pos, "a term, name or connective")
        if m.group("marker"):
            tokens.append(("marker", m.group("marker"), m.start("marker")))
        elif m.group("word"):
            word = m.group("word")
            tokens.append((_KEYWORDS.get(word, "name"), word, m.start("word")))
        else:
            op = m.group("op")
            tokens.append((_F_CANON.get(op, op), op, m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _FormulaParser:
    """Recursive descent; ¬ and quantifiers bind tightest, ↔ loosest.

    The dot after a quantified variable opens a maximal scope: everything up
    to the closing parenthesis or end of input belongs to the body.
    """

    def __init__(self, text: str, signature: Signature, allow_placeholders: bool):
        self.tokens = _f_tokenize(text)
        self.sig = signature
        self.placeholders = allow_placeholders
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind: str):
        tok = self.tokens[self.i]
        if tok[0] != kind:
            raise FormulaSyntaxError(tok[2], kind)
        self.i += 1
        return tok

    def parse(self) -> Formula:
        node = self.iff()
        tok = self.peek()
        if tok[0] != "end":
            raise FormulaSyntaxError(tok[2], "end of input")
        return node

    def iff(self) -> Formula:
        node = self.implies()
        while self.peek()[0] == "iff":
            self.take("iff")
            node = Iff(node, self.implies())
        return node

    def implies(self) -> Formula:
        node = self.disjunction()
        if self.peek()[0] == "implies":
            self.take("implies")
            return Implies(node, self.implies())
        return node

    def disjunction(self) -> Formula:
        node = self.conjunction()
        while self.peek()[0] == "or":
            self.take("or")
            node = Or(node, self.conjunction())
        return node

    def conjunction(self) -> Formula:
        node = self.unary()
        while self.peek()[0] == "and":
            self.take("and")
            node = And(node, self.unary())
        return node

    def unary(self) -> Formula:
        kind, text, pos = self.peek()
        if kind == "not":
            self.take("not")
            return Not(self.unary())
        if kind in ("forall", "exists"):
            self.take(kind)
            var = self.take("name")[1]
            if var in self.sig.constants or var in self.sig.functions:
                raise FormulaSyntaxError(pos, f"fresh variable (not {var!r})")
            self.take(".")
            body = self.iff()  # maximal scope
            return Forall(var, body) if kind == "forall" else Exists(var, body)
        if kind == "(":
            self.take("(")
            node = self.iff()
            self.take(")")
            return node
        return self.atom_or_equality()

    def atom_or_equality(self) -> Formula:
        kind, text, pos = self.peek()
        if kind == "name" and text in self.sig.relations:
            self.take("name")
            want = self.sig.relations[text]
            if want == 0:
                return Atom(text, ())
            args = self.args(pos)
            if len(args) != want:
                raise ArityError(f"relation {text!r} wants {want} arguments, got {len(args)}")
            return Atom(text, args)
        left = self.term()
        self.take("=")
        right = self.term()
        return Eq(left, right)

    def args(self, pos: int) -> tuple[Term, ...]:
        self.take("(")
        out = [self.term()]
        while self.peek()[0] == ",":
            self.take(",")
            out.append(self.term())
        self.take(")")
        return tuple(out)

    def term(self) -> Term:
        kind, text, pos = self.peek()
        if kind == "marker":
            if not self.placeholders:
                raise FormulaSyntaxError(pos, "a term (placeholders only valid in templates)")
            self.take("marker")
            return Placeholder(int(text[1:]))
        if kind != "name":
            raise FormulaSyntaxError(pos, "a term")
        self.take("name")
        if text in self.sig.functions:
            arglist = self.args(pos)
            want = self.sig.functions[text]
            if len(arglist) != want:
                raise ArityError(f"function {text!r} wants {want} arguments, got {len(arglist)}")
            return Func(text, arglist)
        if text in self.sig.relations:
            raise FormulaSyntaxError(pos, f"a term ({text!r} is a relation)")
        if text in self.sig.constants:
            return Const(text)
        return Var(text)


def parse_fo_formula(
    text: str, signature: Signature, *, allow_placeholders: bool = False
) -> Formula:
    """Parse and arity-check a formula over the given signature."""
    return _FormulaParser(text, signature, allow_placeholders).parse()


# --------------------------------------------------------------------------
# Pretty printing (round-trips through parse_fo_formula)

_F_LEVEL = {Iff: 1, Implies: 2, Or: 3, And: 4}


def format_fo_formula(phi: Formula) -> str:
    def term(t: Term) -> str:
        if isinstance(t, Var) or isinstance(t, Const):
            return t.name
        if isinstance(t, Placeholder):
            return f"#{t.index}"
        return f"{t.name}({', '.join(term(a) for a in t.args)})"

    def fmt(node: Formula, min_level: int, rightmost: bool) -> str:
        if isinstance(node, Atom):
            if not node.args:
                return node.name
            return f"{node.name}({', '.join(term(a) for a in node.args)})"
        if isinstance(node, Eq):
            text = f"{term(node.left)} = {term(node.right)}"
            return f"({text})" if min_level > 5 else text
        if isinstance(node, Not):
            return "¬" + fmt(node.child, 6, rightmost)
        if isinstance(node, (Forall, Exists)):
            # The dot opens a maximal scope; parentheses are needed exactly
            # when more of the enclosing expression follows on the right.
            q = "∀" if isinstance(node, Forall) else "∃"
            text = f"{q}{node.var}. {fmt(node.body, 1, True)}"
            return text if rightmost else f"({text})"
        level = _F_LEVEL[type(node)]
        parens = level < min_level
        tail = True if parens else rightmost
        if isinstance(node, And):
            text = f"{fmt(node.left, level, False)} ∧ {fmt(node.right, level + 1, tail)}"
        elif isinstance(node, Or):
            text = f"{fmt(node.left, level, False)} ∨ {fmt(node.right, level + 1, tail)}"
        elif isinstance(node, Implies):
            text = f"{fmt(node.left, level + 1, False)} → {fmt(node.right, level, tail)}"
        else:
            text = f"{fmt(node.left, level, False)} ↔ {fmt(node.right, level + 1, tail)}"
        return f"({text})" if parens else text

    return fmt(phi, 0, True)


# --------------------------------------------------------------------------
# Translation


def formula_variables(phi: Formula) -> set[str]:
    """All variable names occurring in the formula, bound or free."""

    def term_vars(t: Term) -> set[str]:
        if isinstance(t, Var):
            return {t.name}
        if isinstance(t, Func):
            out: set[str] = set()
            for a in t.args:
                out |= term_vars(a)
            return out
        return set()

    if isinstance(phi, Atom):
        out: set[str] = set()
        for a in phi.args:
            out |= term_vars(a)
        return out
    if isinstance(phi, Eq):
        return term_vars(phi.left) | term_vars(phi.right)
    if isinstance(phi, Not):
        return formula_variables(phi.child)
    if isinstance(phi, (And, Or, Implies, Iff)):
        return formula_variables(phi.left) | formula_variables(phi.right)
    if isinstance(phi, (Forall, Exists)):
        return formula_variables(phi.body) | {phi.var}
    raise TypeError(phi)


def free_variables(phi: Formula, bound: frozenset[str] = frozenset()) -> set[str]:
    def term_free(t: Term) -> set[str]:
        if isinstance(t, Var):
            return {t.name} - bound
        if isinstance(t, Func):
            out: set[str] = set()
            for a in t.args:
                out |= term_free(a)
            return out
        return set()

    if isinstance(phi, Atom):
        out: set[str] = set()
        for a in phi.args:
            out |= term_free(a)
        return out
    if isinstance(phi, Eq):
        return term_free(phi.left) | term_free(phi.right)
    if isinstance(phi, Not):
        return free_variables(phi.child, bound)
    if isinstance(phi, (And, Or, Implies, Iff)):
        return free_variables(phi.left, bound) | free_variables(phi.right, bound)
    if isinstance(phi, (Forall, Exists)):
        return free_variables(phi.body, bound | {phi.var})
    raise TypeError(phi)


def _has_quantifier(phi: Formula) -> bool:
    if isinstance(phi, (Forall, Exists)):
        return True
    if isinstance(phi, Not):
        return _has_quantifier(phi.child)
    if isinstance(phi, (And, Or, Implies, Iff)):
        return _has_quantifier(phi.left) or _has_quantifier(phi.right)
    return False


def _substitute_term(t: Term, table: dict, rename: dict[str, str]) -> Term:
    if isinstance(t, Placeholder):
        try:
            return table[t.index]
        except KeyError:
            raise ArityError(f"template uses #{t.index} beyond the symbol's arity")
    if isinstance(t, Var):
        return Var(rename.get(t.name, t.name))
    if isinstance(t, Func):
        return Func(t.name, tuple(_substitute_term(a, table, rename) for a in t.args))
    return t


def _instantiate(phi: Formula, table: dict, rename: dict[str, str], fresh: Iterator[str]) -> Formula:
    if isinstance(phi, Atom):
        return Atom(phi.name, tuple(_substitute_term(a, table, rename) for a in phi.args))
    if isinstance(phi, Eq):
        return Eq(
            _substitute_term(phi.left, table, rename),
            _substitute_term(phi.right, table, rename),
        )
    if isinstance(phi, Not):
        return Not(_instantiate(phi.child, table, rename, fresh))
    if isinstance(phi, (And, Or, Implies, Iff)):
        cls = type(phi)
        return cls(
            _instantiate(phi.left, table, rename, fresh),
            _instantiate(phi.right, table, rename, fresh),
        )
    if isinstance(phi, (Forall, Exists)):
        # Capture avoidance: template-bound variables get fresh names.
        new_name = next(fresh)
        inner = dict(rename)
        inner[phi.var] = new_name
        cls = type(phi)
        return cls(new_name, _instantiate(phi.body, table, inner, fresh))
    raise TypeError(phi)


def _fresh_names(taken: set[str]) -> Iterator[str]:
    i = 0
    while True:
        i += 1
        name = f"w{i}"
        if name not in taken:
            taken.add(name)
            yield name


def translate_atom(
    atom: Atom,
    mapping: Mapping,
    template_signature: Signature,
    fresh: Optional[Iterator[str]] = None,
    *,
    allow_quantified_templates: bool = False,
) -> Formula:
    """Rewrite one student atom over the canonical vocabulary."""
    entry = mapping.entry_for(atom.name)
    if entry.matched is None:
        raise MissingTranslation(atom.name)
    target = entry.matched
    arity = target.signature.placeholder_count
    perm = entry.applied_permutation or tuple(range(1, arity + 1))
    canonical_args: list[Term] = [Var("_")] * arity
    for i, arg in enumerate(atom.args):
        canonical_args[perm[i] - 1] = arg
    if target.translation is None:
        return Atom(target.name, tuple(canonical_args))
    template = parse_fo_formula(
        target.translation.text, template_signature, allow_placeholders=True
    )
    if _has_quantifier(template) and not allow_quantified_templates:
        raise TemplateNotQuantifierFree(target.name)
    table = {i + 1: arg for i, arg in enumerate(canonical_args)}
    if fresh is None:
        fresh = _fresh_names(formula_variables(atom))
    return _instantiate(template, table, {}, fresh)


def translate_formula(
    phi: Formula,
    mapping: Mapping,
    template_signature: Signature,
    *,
    allow_quantified_templates: bool = False,
) -> Formula:
    """Rewrite a whole student formula over the canonical vocabulary.

    Non-atom structure is preserved; fresh variables introduced by quantified
    templates (when enabled) avoid every variable of the input formula.
    """
    fresh = _fresh_names(set(formula_variables(phi)))

    def walk(node: Formula) -> Formula:
        if isinstance(node, Atom):
            return translate_atom(
                node,
                mapping,
                template_signature,
                fresh,
                allow_quantified_templates=allow_quantified_templates,
            )
        if isinstance(node, Eq):
            return node
        if isinstance(node, Not):
            return Not(walk(node.child))
        if isinstance(node, (And, Or, Implies, Iff)):
            return type(node)(walk(node.left), walk(node.right))
        if isinstance(node, (Forall, Exists)):
            return type(node)(node.var, walk(node.body))
        raise TypeError(node)

    return walk(phi)


# --------------------------------------------------------------------------
# Finite models

#: Interpretation-space bound for enumerate_models.
MODEL_SPACE_BOUND = 10_000_000


def interpretation_space_size(signature: Signature, domain_size: int) -> int:
    size = 1
    for arity in signature.relations.values():
        size *= 2 ** (domain_size**arity)
    for arity in signature.functions.values():
        size *= domain_size ** (domain_size**arity)
    size *= domain_size ** len(signature.constants)
    return size


def all_interpretations(signature: Signature, domain_size: int) -> Iterator[dict]:
    """Every interpretation of the signature over domain {0..n-1}.

    Relations map to frozensets of argument tuples, functions to dicts from
    argument tuples to elements, constants to elements.  Deterministic order.
    """
    if domain_size < 1:
        raise ArityError("domain size must be at least 1")
    size = interpretation_space_size(signature, domain_size)
    if size > MODEL_SPACE_BOUND:
        raise TooLarge(size, MODEL_SPACE_BOUND)
    domain = range(domain_size)

    names: list[str] = []
    choices: list[list] = []
    for name, arity in signature.relations.items():
        tuples = list(itertools.product(domain, repeat=arity))
        names.append(name)
        choices.append(
            [
                frozenset(t for t, keep in zip(tuples, mask) if keep)
                for mask in itertools.product((False, True), repeat=len(tuples))
            ]
        )
    for name, arity in signature.functions.items():
        tuples = list(itertools.product(domain, repeat=arity))
        names.append(name)
        choices.append(
            [
                dict(zip(tuples, values))
                for values in itertools.product(domain, repeat=len(tuples))
            ]
        )
    for name in sorted(signature.constants):
        names.append(name)
        choices.append(list(domain))

    for combo in itertools.product(*choices):
        yield dict(zip(names, combo))


def holds(phi: Formula, interpretation: dict, domain_size: int, env: Optional[dict] = None) -> bool:
    """Truth of a formula in one interpretation; env binds free variables."""
    env = dict(env) if env else {}
    free = free_variables(phi) - set(env)
    if free:
        raise FreeVariable(sorted(free)[0])
    return _holds(phi, interpretation, range(domain_size), env)


_UNBOUND = object()


def _eval_term(t: Term, interp: dict, env: dict) -> int:
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Const):
        return interp[t.name]
    if isinstance(t, Func):
        args = tuple(_eval_term(a, interp, env) for a in t.args)
        return interp[t.name][args]
    raise TypeError(f"cannot evaluate {t!r}")


def _holds(phi: Formula, interp: dict, domain, env: dict) -> bool:
    if isinstance(phi, Atom):
        args = tuple(_eval_term(a, interp, env) for a in phi.args)
        return args in interp[phi.name]
    if isinstance(phi, Eq):
        return _eval_term(phi.left, interp, env) == _eval_term(phi.right, interp, env)
    if isinstance(phi, Not):
        return not _holds(phi.child, interp, domain, env)
    if isinstance(phi, And):
        return _holds(phi.left, interp, domain, env) and _holds(phi.right, interp, domain, env)
    if isinstance(phi, Or):
        return _holds(phi.left, interp, domain, env) or _holds(phi.right, interp, domain, env)
    if isinstance(phi, Implies):
        return (not _holds(phi.left, interp, domain, env)) or _holds(
            phi.right, interp, domain, env
        )
    if isinstance(phi, Iff):
        return _holds(phi.left, interp, domain, env) == _holds(phi.right, interp, domain, env)
    if isinstance(phi, (Forall, Exists)):
        # Save any shadowed outer binding; (∃x ...) ∧ P(x) must still see it.
        var = phi.var
        saved = env.get(var, _UNBOUND)
        want = isinstance(phi, Exists)
        result = not want
        for value in domain:
            env[var] = value
            if _holds(phi.body, interp, domain, env) == want:
                result = want
                break
        if saved is _UNBOUND:
            env.pop(var, None)
        else:
            env[var] = saved
        return result
    raise TypeError(phi)


def enumerate_models(signature: Signature, phi: Formula, domain_size: int) -> int:
    """Number of interpretations over {0..n-1} satisfying the sentence."""
    free = free_variables(phi)
    if free:
        raise FreeVariable(sorted(free)[0])
    count = 0
    for interp in all_interpretations(signature, domain_size):
        if _holds(phi, interp, range(domain_size), {}):
            count += 1
    return count
