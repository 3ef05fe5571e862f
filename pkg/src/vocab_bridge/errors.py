"""Exception types shared across the package."""
from __future__ import annotations


class VocabBridgeError(Exception):
    """Base class for all errors raised by this package."""


class ParameterUnused(VocabBridgeError):
    """A declared parameter token never occurs in the description text."""

    def __init__(self, token: str) -> None:
        super().__init__(f"parameter {token!r} does not occur in the description")
        self.token = token


class ConditionSyntaxError(VocabBridgeError):
    """Malformed Boolean condition text."""

    def __init__(self, position: int, expected: str) -> None:
        super().__init__(f"at position {position}: expected {expected}")
        self.position = position
        self.expected = expected


class FormulaSyntaxError(VocabBridgeError):
    """Malformed formula text."""

    def __init__(self, position: int, expected: str) -> None:
        super().__init__(f"at position {position}: expected {expected}")
        self.position = position
        self.expected = expected


class UnknownSymbol(VocabBridgeError):
    def __init__(self, name: str) -> None:
        super().__init__(f"unknown symbol {name!r}")
        self.name = name


class DuplicateSymbol(VocabBridgeError):
    def __init__(self, name: str) -> None:
        super().__init__(f"symbol {name!r} declared more than once")
        self.name = name


class ArityMismatch(VocabBridgeError):
    def __init__(self, message: str) -> None:
        super().__init__(message)


class BadPermutation(VocabBridgeError):
    def __init__(self, message: str) -> None:
        super().__init__(message)


class XmlError(VocabBridgeError):
    """Task document is not well-formed or violates the dialect."""


class GrammarSyntaxError(VocabBridgeError):
    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class EpsilonNotAllowed(VocabBridgeError):
    def __init__(self, line: int) -> None:
        super().__init__(f"line {line}: empty alternative (grammars must be epsilon-free)")
        self.line = line


class UnproductiveNonterminal(VocabBridgeError):
    def __init__(self, name: str) -> None:
        super().__init__(f"nonterminal {name!r} derives no terminal string")
        self.name = name


class UnreachableNonterminal(VocabBridgeError):
    def __init__(self, name: str) -> None:
        super().__init__(f"nonterminal {name!r} is unreachable from the start symbol")
        self.name = name


class MissingGrammar(VocabBridgeError):
    def __init__(self, symbol: str, description_index: int, category: str) -> None:
        super().__init__(
            f"no grammar produces positive examples (symbol {symbol!r}, "
            f"description {description_index}, category {category})"
        )
        self.symbol = symbol
        self.description_index = description_index
        self.category = category


class EmptyDataset(VocabBridgeError):
    def __init__(self) -> None:
        super().__init__("dataset contains no pairs")


class EmptyAttempt(VocabBridgeError):
    def __init__(self) -> None:
        super().__init__("attempt declares no symbols")


class ScorerUnavailable(VocabBridgeError):
    def __init__(self, endpoint: str, reason: str) -> None:
        super().__init__(f"scorer at {endpoint} unavailable: {reason}")
        self.endpoint = endpoint
        self.reason = reason


class MissingTranslation(VocabBridgeError):
    def __init__(self, symbol: str) -> None:
        super().__init__(f"symbol {symbol!r} has no canonical counterpart to translate into")
        self.symbol = symbol


class ArityError(VocabBridgeError):
    def __init__(self, message: str) -> None:
        super().__init__(message)


class TemplateNotQuantifierFree(VocabBridgeError):
    def __init__(self, symbol: str) -> None:
        super().__init__(
            f"translation template for {symbol!r} contains quantifiers "
            "(enable allow_quantified_templates to permit this)"
        )
        self.symbol = symbol


class TooLarge(VocabBridgeError):
    def __init__(self, size: int, bound: int) -> None:
        super().__init__(f"interpretation space has {size} elements (bound {bound})")
        self.size = size
        self.bound = bound


class FreeVariable(VocabBridgeError):
    def __init__(self, name: str) -> None:
        super().__init__(f"formula has free variable {name!r}; model counting needs a sentence")
        self.name = name


class BadPayload(VocabBridgeError):
    def __init__(self, message: str) -> None:
        super().__init__(f"attempt payload: {message}")
