"""Vocabulary primitives: symbols, descriptions, categories, and text preparation.

Every piece of student or instructor text that takes part in grading goes
through the same two steps: `normalize_description` (case, whitespace and
quote-like characters) and `canonicalize_parameters` (parameter tokens become
positional #i markers).  Matching, grammars and scorers all operate on the
prepared form, never on raw text.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import ArityMismatch, BadPermutation, DuplicateSymbol, ParameterUnused

# Characters stripped by normalization, nothing more: straight and typographic
# quotes plus the two accent marks that commonly leak in from word processors.
_STRIPPED = "\"'`´“”„"
_STRIP_RE = re.compile("[%s]" % re.escape(_STRIPPED))

# Default parameter tokens for arity-k symbols, in binding order.
_DEFAULT_TOKENS = "uvwxyz"


def normalize_description(raw: str) -> str:
    """Lower-case, strip quote-like characters, collapse whitespace runs.

    Idempotent, and never lengthens the input: lowercasing is done per
    character and keeps a single code point even where str.lower() would
    expand (U+0130 is the one offender).
    """
    lowered = "".join(c.lower()[0] for c in raw)
    stripped = _STRIP_RE.sub("", lowered)
    return " ".join(stripped.split())


def parameter_tokens(arity: int) -> tuple[str, ...]:
    """Default placeholder tokens (u, v, w, ...) for a symbol of the given arity."""
    if arity <= len(_DEFAULT_TOKENS):
        return tuple(_DEFAULT_TOKENS[:arity])
    extra = tuple(f"u{i}" for i in range(len(_DEFAULT_TOKENS) + 1, arity + 1))
    return tuple(_DEFAULT_TOKENS) + extra


def canonicalize_parameters(text: str, params: Sequence[str]) -> str:
    """Replace standalone occurrences of the i-th parameter token with ``#i``.

    ``text`` is expected to be normalized already; tokens are matched at word
    boundaries only, so a parameter ``u`` never fires inside ``unary``.
    Raises ParameterUnused for a token with no occurrence.
    """
    if not params:
        return text
    lowered = [normalize_description(p) for p in params]
    index = {tok: i + 1 for i, tok in enumerate(lowered)}
    if len(index) != len(lowered):
        raise BadPermutation(f"parameter tokens {list(params)!r} collide after normalization")
    alternation = "|".join(re.escape(t) for t in sorted(index, key=len, reverse=True))
    pattern = re.compile(r"(?<![\w#])(?:%s)(?![\w])" % alternation)
    seen: set[str] = set()

    def _mark(m: re.Match[str]) -> str:
        tok = m.group(0)
        seen.add(tok)
        return f"#{index[tok]}"

    result = pattern.sub(_mark, text)
    for tok in lowered:
        if tok not in seen:
            raise ParameterUnused(tok)
    return result


class Kind(enum.Enum):
    """What sort of vocabulary symbol a declaration introduces."""

    PROPOSITION = "proposition"
    RELATION = "relation"
    FUNCTION = "function"
    CONSTANT = "constant"


@dataclass(frozen=True)
class SymbolKind:
    """Kind plus arity; propositions and constants carry no arity."""

    kind: Kind
    arity: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind in (Kind.RELATION, Kind.FUNCTION):
            if self.arity is None or self.arity < 1:
                raise ArityMismatch(f"{self.kind.value} symbols need arity >= 1")
        elif self.arity not in (None, 0):
            raise ArityMismatch(f"{self.kind.value} symbols carry no arity")

    @property
    def placeholder_count(self) -> int:
        # Relations and functions describe their arguments; propositions and
        # constants are closed phrases.
        if self.kind in (Kind.RELATION, Kind.FUNCTION):
            assert self.arity is not None
            return self.arity
        return 0

    def __str__(self) -> str:
        if self.placeholder_count:
            return f"{self.kind.value}/{self.arity}"
        return self.kind.value


class Category(enum.Enum):
    """Five-level grading scale; C1 is best, C3 the worst still-acceptable level."""

    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    C4 = "C4"
    C5 = "C5"

    @property
    def rank(self) -> int:
        """1 for C1 down to 5 for C5; smaller is better."""
        return int(self.value[1])

    @property
    def positive(self) -> bool:
        return self.rank <= 3

    def better_than(self, other: "Category") -> bool:
        return self.rank < other.rank


POSITIVE_CATEGORIES = frozenset({Category.C1, Category.C2, Category.C3})
NEGATIVE_CATEGORIES = frozenset({Category.C4, Category.C5})

#: Score attached to a category when a scorer classifies directly.
CANONICAL_SCORES: dict[Category, float] = {
    Category.C1: 1.0,
    Category.C2: 0.8,
    Category.C3: 0.6,
    Category.C4: 0.3,
    Category.C5: 0.0,
}


def _slot_order(text: str, tokens: Sequence[str]) -> tuple[str, ...]:
    """Tokens sorted by first standalone occurrence in the normalized text."""
    positions = []
    for tok in tokens:
        m = re.search(r"(?<![\w#])%s(?![\w])" % re.escape(tok), text)
        if m is None:
            raise ParameterUnused(tok)
        positions.append((m.start(), tok))
    return tuple(tok for _, tok in sorted(positions))


@dataclass(frozen=True)
class Description:
    """One way of phrasing a symbol, with placeholder bookkeeping.

    ``tokens`` are the symbol's canonical parameter tokens.  ``permutation``
    maps description slots (order of first appearance in the text) to
    canonical argument positions: slot i talks about argument permutation[i-1].
    """

    text: str
    tokens: tuple[str, ...] = ()
    permutation: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        arity = len(self.tokens)
        perm = self.permutation or tuple(range(1, arity + 1))
        if sorted(perm) != list(range(1, arity + 1)):
            raise BadPermutation(f"{perm!r} is not a permutation of 1..{arity}")
        object.__setattr__(self, "permutation", perm)
        normalized = normalize_description(self.text)
        slots = _slot_order(normalized, self.tokens)
        object.__setattr__(self, "_normalized", normalized)
        object.__setattr__(self, "_slots", slots)
        object.__setattr__(self, "_canonical", canonicalize_parameters(normalized, slots))

    @property
    def normalized(self) -> str:
        return self._normalized  # type: ignore[attr-defined]

    @property
    def slots(self) -> tuple[str, ...]:
        """Parameter tokens in order of first appearance."""
        return self._slots  # type: ignore[attr-defined]

    @property
    def canonical(self) -> str:
        """Normalized text with slot-ordered #i markers."""
        return self._canonical  # type: ignore[attr-defined]


@dataclass(frozen=True)
class TranslationTemplate:
    """Target formula text with #1..#k placeholders, parsed on demand."""

    text: str


@dataclass(frozen=True)
class PotentialSymbol:
    """An instructor-declared symbol of the solution vocabulary."""

    name: str
    signature: SymbolKind
    descriptions: tuple[Description, ...]
    translation: Optional[TranslationTemplate] = None

    def __post_init__(self) -> None:
        if not self.descriptions:
            raise ArityMismatch(f"symbol {self.name!r} needs at least one description")
        want = self.signature.placeholder_count
        for d in self.descriptions:
            if len(d.tokens) != want:
                raise ArityMismatch(
                    f"symbol {self.name!r}: description carries {len(d.tokens)} "
                    f"placeholders, signature wants {want}"
                )

    @property
    def primary(self) -> Description:
        return self.descriptions[0]


@dataclass(frozen=True)
class StudentSymbol:
    """One symbol of a student attempt, as typed in."""

    name: str
    signature: SymbolKind
    params: tuple[str, ...] = ()
    description: str = ""

    def __post_init__(self) -> None:
        want = self.signature.placeholder_count
        if len(self.params) != want:
            raise ArityMismatch(
                f"symbol {self.name!r} declares {len(self.params)} parameters, "
                f"signature wants {want}"
            )

    @property
    def canonical_description(self) -> str:
        """Normalized description with declared-order #i markers."""
        return canonicalize_parameters(normalize_description(self.description), self.params)


def signature_compatible(student: SymbolKind, potential: SymbolKind) -> bool:
    """Exact kind and arity agreement; no coercions between kinds."""
    return student == potential


@dataclass(frozen=True)
class Attempt:
    """A full student submission: an ordered tuple of symbols."""

    symbols: tuple[StudentSymbol, ...]

    def __post_init__(self) -> None:
        names = [s.name for s in self.symbols]
        if len(set(names)) != len(names):
            dup = next(n for n in names if names.count(n) > 1)
            raise DuplicateSymbol(dup)


@dataclass(frozen=True)
class MappingEntry:
    """Result of matching one student symbol against the solution vocabulary."""

    student: StudentSymbol
    matched: Optional[PotentialSymbol]
    category: Category
    score: float
    matched_description_index: Optional[int] = None
    applied_permutation: Optional[tuple[int, ...]] = None

    @property
    def positive(self) -> bool:
        return self.category.positive


@dataclass(frozen=True)
class Mapping:
    """Per-symbol best-fit assignment for a whole attempt, in attempt order."""

    entries: tuple[MappingEntry, ...] = field(default_factory=tuple)

    def matched_names(self) -> set[str]:
        """Names of potential symbols hit with a positive category."""
        return {
            e.matched.name
            for e in self.entries
            if e.matched is not None and e.positive
        }

    def entry_for(self, student_name: str) -> MappingEntry:
        for e in self.entries:
            if e.student.name == student_name:
                return e
        raise KeyError(student_name)
