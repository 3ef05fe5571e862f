"""Context-free grammars for admissible description phrasings.

A grammar file holds one rule per line, ``N -> alt | alt``, with ``//``
comments.  Uppercase-initial tokens are nonterminals; everything else is a
terminal word.  Double-quoted strings may hold several words ("user
interface") and are split into single-word terminals at parse time, after
normalization, so grammars and graded descriptions always meet on the same
prepared text.  ``#i`` markers stand for parameter positions.

Grammars must be epsilon-free, and every nonterminal must be productive and
reachable; violations are rejected at parse time rather than surfacing as
puzzling empty languages later.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Optional

from .core import normalize_description
from .errors import (
    EpsilonNotAllowed,
    GrammarSyntaxError,
    UnproductiveNonterminal,
    UnreachableNonterminal,
)

#: Strings longer than this many words are never enumerated; a cycle that
#: only ever adds unit productions would otherwise spin forever.
_MAX_TOKENS = 200

#: Default cap on distinct strings enumerated from one grammar.
ENUMERATION_CAP = 10_000


class Sym(NamedTuple):
    terminal: bool
    text: str


def _is_nonterminal(token: str) -> bool:
    return token[0].isupper() and token[0].isascii()


def _split_outside_quotes(line: str, sep: str) -> list[str]:
    parts = []
    current = []
    in_quotes = False
    for ch in line:
        if ch == '"':
            in_quotes = not in_quotes
            current.append(ch)
        elif ch == sep and not in_quotes:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    parts.append("".join(current))
    return parts


def _strip_comment(line: str) -> str:
    in_quotes = False
    for i, ch in enumerate(line):
        if ch == '"':
            in_quotes = not in_quotes
        elif ch == "/" and not in_quotes and line[i : i + 2] == "//":
            return line[:i]
    return line


def _parse_alternative(chunk: str, lineno: int) -> tuple[Sym, ...]:
    symbols: list[Sym] = []
    i = 0
    while i < len(chunk):
        ch = chunk[i]
        if ch.isspace():
            i += 1
            continue
        if ch == '"':
            end = chunk.find('"', i + 1)
            if end < 0:
                raise GrammarSyntaxError(lineno, "unterminated quoted terminal")
            words = normalize_description(chunk[i + 1 : end]).split()
            if not words:
                raise EpsilonNotAllowed(lineno)
            symbols.extend(Sym(True, w) for w in words)
            i = end + 1
            continue
        j = i
        while j < len(chunk) and not chunk[j].isspace() and chunk[j] != '"':
            j += 1
        token = chunk[i:j]
        if _is_nonterminal(token):
            if not token.replace("_", "").isalnum():
                raise GrammarSyntaxError(lineno, f"bad nonterminal {token!r}")
            symbols.append(Sym(False, token))
        else:
            word = normalize_description(token)
            if not word:
                raise EpsilonNotAllowed(lineno)
            if " " in word:
                raise GrammarSyntaxError(lineno, f"terminal {token!r} must be one word")
            symbols.append(Sym(True, word))
        i = j
    if not symbols:
        raise EpsilonNotAllowed(lineno)
    return tuple(symbols)


@dataclass
class Grammar:
    """Validated epsilon-free CFG with enumeration and membership."""

    start: str
    productions: dict[str, list[tuple[Sym, ...]]]
    source: str = ""
    _enum_memo: dict = field(default_factory=dict, repr=False, compare=False)
    _cyk: Optional[tuple] = field(default=None, repr=False, compare=False)

    def enumerate(self, max_count: int = ENUMERATION_CAP) -> list[str]:
        return enumerate_derivations(self, max_count)

    def accepts(self, text: str) -> bool:
        return membership(self, text)


def parse_grammar(text: str) -> Grammar:
    """Parse and validate grammar source text."""
    productions: dict[str, list[tuple[Sym, ...]]] = {}
    start: Optional[str] = None
    for lineno, raw_line in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw_line).strip()
        if not line:
            continue
        if "->" not in line:
            raise GrammarSyntaxError(lineno, "missing '->'")
        lhs_text, rhs_text = line.split("->", 1)
        lhs = lhs_text.strip()
        if not lhs or not _is_nonterminal(lhs) or not lhs.replace("_", "").isalnum():
            raise GrammarSyntaxError(lineno, f"left-hand side {lhs!r} is not a nonterminal")
        alternatives = [
            _parse_alternative(chunk, lineno)
            for chunk in _split_outside_quotes(rhs_text, "|")
        ]
        productions.setdefault(lhs, []).extend(alternatives)
        if start is None:
            start = lhs
    if start is None:
        raise GrammarSyntaxError(0, "grammar has no rules")

    _validate(start, productions)
    return Grammar(start=start, productions=productions, source=text)


def _validate(start: str, productions: dict[str, list[tuple[Sym, ...]]]) -> None:
    defined = set(productions)
    for lhs in productions:
        for alt in productions[lhs]:
            for sym in alt:
                if not sym.terminal and sym.text not in defined:
                    # No rule at all: cannot derive any terminal string.
                    raise UnproductiveNonterminal(sym.text)

    productive: set[str] = set()
    changed = True
    while changed:
        changed = False
        for lhs, alts in productions.items():
            if lhs in productive:
                continue
            for alt in alts:
                if all(s.terminal or s.text in productive for s in alt):
                    productive.add(lhs)
                    changed = True
                    break
    for lhs in productions:
        if lhs not in productive:
            raise UnproductiveNonterminal(lhs)

    reachable = {start}
    frontier = [start]
    while frontier:
        current = frontier.pop()
        for alt in productions[current]:
            for sym in alt:
                if not sym.terminal and sym.text not in reachable:
                    reachable.add(sym.text)
                    frontier.append(sym.text)
    for lhs in productions:
        if lhs not in reachable:
            raise UnreachableNonterminal(lhs)


# ---------------------------------------------------------------------------
# Enumeration: all derivable strings in shortlex order (token count, then
# lexicographic), capped.  Dynamic programming over exact token lengths; only
# unit productions keep the length, so each level needs a small fixpoint.


def _strings_for_seq(g: Grammar, seq: tuple[Sym, ...], length: int) -> set[str]:
    """All strings of exactly `length` tokens derivable from a symbol sequence.

    Consults the memo of strictly shorter lengths only; callers ensure every
    nonterminal part is shorter than the level being built (true for any
    production with two or more symbols, since grammars are epsilon-free).
    """
    if not seq:
        return {""} if length == 0 else set()
    head, rest = seq[0], seq[1:]
    out: set[str] = set()
    if head.terminal:
        if length < 1:
            return out
        for tail in _strings_for_seq(g, rest, length - 1):
            out.add(head.text if not tail else f"{head.text} {tail}")
        return out
    max_head = length - len(rest)  # every remaining symbol eats >= 1 token
    for head_len in range(1, max_head + 1):
        heads = g._enum_memo.get((head.text, head_len), set())
        if not heads:
            continue
        for tail in _strings_for_seq(g, rest, length - head_len):
            for h in heads:
                out.add(h if not tail else f"{h} {tail}")
    return out


def _compute_level(g: Grammar, length: int) -> None:
    """Fill g._enum_memo[(A, length)] for every nonterminal A.

    Unit productions are the one place a set of the current length feeds
    another, so they get a fixpoint pass; everything else reads shorter
    lengths straight from the memo.
    """
    level: dict[str, set[str]] = {name: set() for name in g.productions}
    units: list[tuple[str, str]] = []
    for name, alts in g.productions.items():
        for alt in alts:
            if len(alt) == 1 and not alt[0].terminal:
                units.append((name, alt[0].text))
            else:
                level[name] |= _strings_for_seq(g, alt, length)
    for _ in range(len(g.productions)):
        grew = False
        for name, child in units:
            if not level[child] <= level[name]:
                level[name] |= level[child]
                grew = True
        if not grew:
            break
    for name in g.productions:
        g._enum_memo[(name, length)] = level[name]


def enumerate_derivations(g: Grammar, max_count: int = ENUMERATION_CAP) -> list[str]:
    """Distinct derivable strings in shortlex order, at most max_count."""
    bound = _finite_max_len(g)
    out: list[str] = []
    length = 0
    while length < (bound if bound is not None else _MAX_TOKENS):
        length += 1
        if (g.start, length) not in g._enum_memo:
            _compute_level(g, length)
        for s in sorted(g._enum_memo[(g.start, length)]):
            out.append(s)
            if len(out) >= max_count:
                return out
    return out


def _sccs(g: Grammar) -> dict[str, int]:
    """Strongly connected components of the nonterminal reference graph."""
    order: list[str] = []
    seen: set[str] = set()

    def refs(name: str) -> list[str]:
        return [s.text for alt in g.productions[name] for s in alt if not s.terminal]

    def visit(name: str) -> None:
        stack = [(name, iter(refs(name)))]
        seen.add(name)
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append((nxt, iter(refs(nxt))))
                    advanced = True
                    break
            if not advanced:
                order.append(node)
                stack.pop()

    for name in g.productions:
        if name not in seen:
            visit(name)

    reverse: dict[str, list[str]] = {name: [] for name in g.productions}
    for name in g.productions:
        for ref in refs(name):
            reverse[ref].append(name)
    component: dict[str, int] = {}
    for root in reversed(order):
        if root in component:
            continue
        comp_id = len(set(component.values()))
        frontier = [root]
        component[root] = comp_id
        while frontier:
            node = frontier.pop()
            for prev in reverse[node]:
                if prev not in component:
                    component[prev] = comp_id
                    frontier.append(prev)
    return component


def _finite_max_len(g: Grammar) -> Optional[int]:
    """Exact maximum token length of the language, or None when unbounded.

    The language is unbounded exactly when some production recurses into its
    own strongly connected component while carrying extra material (rules are
    epsilon-free, so each pump strictly lengthens the yield).  Pure unit-cycle
    recursion adds nothing and is skipped when computing the bound.
    """
    component = _sccs(g)
    for lhs, alts in g.productions.items():
        for alt in alts:
            if len(alt) < 2:
                continue
            if any(
                not s.terminal and component[s.text] == component[lhs] for s in alt
            ):
                return None

    maxlen: dict[str, int] = {}

    def compute(name: str) -> int:
        if name in maxlen:
            return maxlen[name]
        members = [n for n in g.productions if component[n] == component[name]]
        best = 0
        for member in members:
            for alt in g.productions[member]:
                if (
                    len(alt) == 1
                    and not alt[0].terminal
                    and component[alt[0].text] == component[member]
                ):
                    continue  # unit edge inside the component
                total = 0
                for s in alt:
                    total += 1 if s.terminal else compute(s.text)
                best = max(best, total)
        for member in members:
            maxlen[member] = best
        return best

    return compute(g.start)


def iter_derivations(g: Grammar, max_count: int = ENUMERATION_CAP) -> Iterator[str]:
    yield from enumerate_derivations(g, max_count)


# ---------------------------------------------------------------------------
# Membership: CYK over an internally binarized grammar with unit closure.


def _binarize(g: Grammar) -> tuple[dict, dict, dict]:
    """Split long right-hand sides; returns (terminal, unit, binary) rule maps.

    terminal: word  -> set of nonterminals deriving exactly that word
    unit:     name  -> set of direct unit parents
    binary:   (l,r) pairs list per parent: parent -> list[(left, right)]
    """
    terminal: dict[str, set[str]] = {}
    unit: dict[str, set[str]] = {}
    binary: dict[str, list[tuple[str, str]]] = {}
    wrappers: dict[str, str] = {}
    fresh = 0

    def wrap_terminal(word: str) -> str:
        nonlocal fresh
        if word not in wrappers:
            name = f"_T{fresh}"
            fresh += 1
            wrappers[word] = name
            terminal.setdefault(word, set()).add(name)
        return wrappers[word]

    for lhs, alts in g.productions.items():
        for alt in alts:
            if len(alt) == 1:
                sym = alt[0]
                if sym.terminal:
                    terminal.setdefault(sym.text, set()).add(lhs)
                else:
                    unit.setdefault(sym.text, set()).add(lhs)
                continue
            names = [
                sym.text if not sym.terminal else wrap_terminal(sym.text)
                for sym in alt
            ]
            parent = lhs
            while len(names) > 2:
                link = f"_B{fresh}"
                fresh += 1
                binary.setdefault(parent, []).append((names[0], link))
                parent = link
                names = names[1:]
            binary.setdefault(parent, []).append((names[0], names[1]))
    return terminal, unit, binary


def _unit_close(cell: set[str], unit: dict[str, set[str]]) -> set[str]:
    frontier = list(cell)
    while frontier:
        name = frontier.pop()
        for parent in unit.get(name, ()):
            if parent not in cell:
                cell.add(parent)
                frontier.append(parent)
    return cell


def membership(g: Grammar, text: str) -> bool:
    """Whether the normalized text is derivable from the grammar's start symbol."""
    tokens = normalize_description(text).split()
    if not tokens:
        return False
    if g._cyk is None:
        g._cyk = _binarize(g)
    terminal, unit, binary = g._cyk

    n = len(tokens)
    # table[i][j] = nonterminals deriving tokens[i : i + j + 1]
    table: list[list[set[str]]] = [[set() for _ in range(n - i)] for i in range(n)]
    for i, word in enumerate(tokens):
        table[i][0] = _unit_close(set(terminal.get(word, ())), unit)
    for span in range(2, n + 1):
        for i in range(n - span + 1):
            cell = table[i][span - 1]
            for split in range(1, span):
                left = table[i][split - 1]
                right = table[i + split][span - split - 1]
                if not left or not right:
                    continue
                for parent, pairs in binary.items():
                    if parent in cell:
                        continue
                    for l, r in pairs:
                        if l in left and r in right:
                            cell.add(parent)
                            break
            _unit_close(cell, unit)
    return g.start in table[0][n - 1]
