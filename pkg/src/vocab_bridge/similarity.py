"""Description-pair scorers, score-to-category classification, and threshold fitting.

Three scorer kinds share one interface: a cheap lexical baseline, the
grammar-membership classifier, and a remote model server speaking a small
JSON protocol.  Categorical scorers return the category directly; numeric
scorers rely on fitted thresholds.
"""
from __future__ import annotations

import os
import re
from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence
from urllib.parse import urlparse

import httpx
from scipy.optimize import minimize

from .core import CANONICAL_SCORES, Category
from .errors import EmptyDataset, ScorerUnavailable, VocabBridgeError
from .taskspec import TaskSpec

REMOTE_TIMEOUT_SECONDS = 10.0

# Ambient default endpoint for the remote scorer.
SCORER_URL_ENV = "VOCAB_BRIDGE_SCORER_URL"


@dataclass(frozen=True)
class ScorerKind:
    """Which scoring backend to use; remote carries its endpoint URL."""

    kind: str
    endpoint: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in ("lexical", "grammar", "remote"):
            raise VocabBridgeError(f"unknown scorer kind {self.kind!r}")
        if self.kind == "remote":
            parsed = urlparse(self.endpoint or "")
            if parsed.scheme not in ("http", "https") or not parsed.netloc:
                raise VocabBridgeError(f"remote scorer needs an absolute URL, got {self.endpoint!r}")
        elif self.endpoint is not None:
            raise VocabBridgeError(f"{self.kind} scorer takes no endpoint")

    @classmethod
    def lexical(cls) -> "ScorerKind":
        return cls("lexical")

    @classmethod
    def grammar(cls) -> "ScorerKind":
        return cls("grammar")

    @classmethod
    def remote(cls, endpoint: str) -> "ScorerKind":
        return cls("remote", endpoint)


@dataclass(frozen=True)
class ScoreResult:
    score: float
    direct_category: Optional[Category] = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.score <= 1.0:
            raise VocabBridgeError(f"score {self.score} out of [0, 1]")
        if self.direct_category is not None and self.score != CANONICAL_SCORES[self.direct_category]:
            raise VocabBridgeError(
                f"categorical result for {self.direct_category.value} must carry its canonical score"
            )


def categorical_result(category: Category) -> ScoreResult:
    return ScoreResult(CANONICAL_SCORES[category], category)


@dataclass(frozen=True)
class Thresholds:
    """Cut points mapping scores to categories; multiclass is non-increasing."""

    binary: float
    multiclass: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        values = (self.binary, *self.multiclass)
        if any(not 0.0 <= v <= 1.0 for v in values):
            raise VocabBridgeError("thresholds must lie in [0, 1]")
        t1, t2, t3, t4 = self.multiclass
        if not t1 >= t2 >= t3 >= t4:
            raise VocabBridgeError("multiclass thresholds must be non-increasing")

    def category_for(self, score: float) -> Category:
        # Ties classify upward: score == t_k earns the better category.
        t1, t2, t3, t4 = self.multiclass
        if score >= t1:
            return Category.C1
        if score >= t2:
            return Category.C2
        if score >= t3:
            return Category.C3
        if score >= t4:
            return Category.C4
        return Category.C5

    def positive_for(self, score: float) -> bool:
        return score >= self.binary


DEFAULT_THRESHOLDS = Thresholds(binary=0.5, multiclass=(0.9, 0.7, 0.5, 0.2))


def classify(result: ScoreResult, thresholds: Thresholds, mode: str = "multiclass"):
    """Category (multiclass mode) or positive polarity (binary mode)."""
    if mode not in ("binary", "multiclass"):
        raise VocabBridgeError(f"unknown classification mode {mode!r}")
    if result.direct_category is not None:
        category = result.direct_category
    else:
        category = thresholds.category_for(result.score)
        if mode == "binary":
            return thresholds.positive_for(result.score)
    return category.positive if mode == "binary" else category


def _levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        current = [i]
        for j, cb in enumerate(b, 1):
            current.append(
                min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb))
            )
        previous = current
    return previous[len(b)]


def lexical_score(d: str, d_star: str) -> ScoreResult:
    """0.5·Jaccard(token sets) + 0.5·(1 − normalized Levenshtein)."""
    tokens_d, tokens_e = set(d.split()), set(d_star.split())
    union = tokens_d | tokens_e
    jaccard = len(tokens_d & tokens_e) / len(union) if union else 1.0
    longest = max(len(d), len(d_star))
    edit = _levenshtein(d, d_star) / longest if longest else 0.0
    return ScoreResult(0.5 * jaccard + 0.5 * (1.0 - edit))


def grammar_classify(spec: TaskSpec, d: str, symbol: str, description_index: int) -> ScoreResult:
    """Best-ranked category whose grammar accepts d; C5 when none does."""
    for category in sorted(Category, key=lambda c: c.rank):
        grammar = spec.grammar_for(symbol, description_index, category)
        if grammar is not None and grammar.accepts(d):
            return categorical_result(category)
    return categorical_result(Category.C5)


def default_scorer(spec: TaskSpec) -> ScorerKind:
    """Best backend available for a task: its own grammars when it ships any,
    otherwise a remote model if one is configured, otherwise the lexical
    baseline."""
    if spec.grammars:
        return ScorerKind.grammar()
    endpoint = os.environ.get(SCORER_URL_ENV)
    if endpoint:
        return ScorerKind.remote(endpoint)
    return ScorerKind.lexical()


class ScoringRequest(NamedTuple):
    d: str
    d_star: str
    symbol: Optional[str] = None
    description_index: int = 1


def score_pairs(
    scorer: ScorerKind,
    pairs: Sequence[ScoringRequest],
    spec: Optional[TaskSpec] = None,
    client: Optional[httpx.Client] = None,
) -> list[ScoreResult]:
    """Score a batch; the remote backend sends one request for the whole batch."""
    if scorer.kind == "lexical":
        return [lexical_score(p.d, p.d_star) for p in pairs]
    if scorer.kind == "grammar":
        if spec is None:
            raise VocabBridgeError("grammar scoring needs the task spec")
        out = []
        for p in pairs:
            if p.symbol is None:
                raise VocabBridgeError("grammar scoring needs the target symbol")
            out.append(grammar_classify(spec, p.d, p.symbol, p.description_index))
        return out
    return _score_remote(scorer.endpoint, pairs, client)


def _score_remote(
    endpoint: str, pairs: Sequence[ScoringRequest], client: Optional[httpx.Client]
) -> list[ScoreResult]:
    if not pairs:
        return []
    body = {"pairs": [{"left": p.d, "right": p.d_star} for p in pairs]}
    try:
        if client is None:
            with httpx.Client(timeout=REMOTE_TIMEOUT_SECONDS) as owned:
                response = owned.post(f"{endpoint.rstrip('/')}/v1/score", json=body)
        else:
            response = client.post(f"{endpoint.rstrip('/')}/v1/score", json=body)
    except httpx.HTTPError as exc:
        raise ScorerUnavailable(endpoint, str(exc)) from exc
    if response.status_code != 200:
        raise ScorerUnavailable(endpoint, f"status {response.status_code}")
    try:
        payload = response.json()
    except ValueError as exc:
        raise ScorerUnavailable(endpoint, "response is not JSON") from exc
    scores = payload.get("scores") if isinstance(payload, dict) else None
    if not isinstance(scores, list) or len(scores) != len(pairs):
        raise ScorerUnavailable(endpoint, "scores missing or of wrong length")
    categories = payload.get("categories")
    if categories is not None and (
        not isinstance(categories, list) or len(categories) != len(pairs)
    ):
        raise ScorerUnavailable(endpoint, "categories of wrong length")
    out = []
    for i, raw in enumerate(scores):
        if not isinstance(raw, (int, float)) or not 0.0 <= raw <= 1.0:
            raise ScorerUnavailable(endpoint, f"score {raw!r} out of [0, 1]")
        if categories is not None:
            name = categories[i]
            if name not in Category._value2member_map_:
                raise ScorerUnavailable(endpoint, f"unknown category {name!r}")
            out.append(categorical_result(Category(name)))
        else:
            out.append(ScoreResult(float(raw)))
    return out


def check_remote_protocol(endpoint: str, client: Optional[httpx.Client] = None) -> None:
    """Probe a scorer server for wire-protocol conformance; raises ScorerUnavailable.

    Checks the health endpoint, the empty batch, response length and order
    (identical pairs must come back as 1.0 in their submitted positions with
    the fallback backend), score ranges, and repeat-call determinism.
    """
    owned = client is None
    if owned:
        client = httpx.Client(timeout=REMOTE_TIMEOUT_SECONDS)
    try:
        try:
            health = client.get(f"{endpoint.rstrip('/')}/v1/health")
        except httpx.HTTPError as exc:
            raise ScorerUnavailable(endpoint, str(exc)) from exc
        if health.status_code != 200 or health.json() != {"status": "ok"}:
            raise ScorerUnavailable(endpoint, "health check failed")

        if _score_remote(endpoint, [], client) != []:
            raise ScorerUnavailable(endpoint, "empty batch must score to an empty list")

        # deliberately not palindromic, so a reversed response is caught
        probe = [
            ScoringRequest("the database works correctly", "the database works correctly"),
            ScoringRequest("the ui runs", "the backend sleeps"),
            ScoringRequest("kim attends the lecture", "kim attends the lecture"),
            ScoringRequest("abc", "xyz"),
        ]
        first = _score_remote(endpoint, probe, client)
        second = _score_remote(endpoint, probe, client)
        if [r.score for r in first] != [r.score for r in second]:
            raise ScorerUnavailable(endpoint, "scores are not deterministic")
        for position in (0, 2):
            if first[position].score != 1.0:
                raise ScorerUnavailable(
                    endpoint, f"identical pair at position {position} did not score 1.0"
                )
    finally:
        if owned:
            client.close()


def request_for_pair(spec: Optional[TaskSpec], pair) -> ScoringRequest:
    index = 1
    if spec is not None:
        try:
            owner = spec.symbol(pair.symbol)
        except VocabBridgeError:
            owner = None
        if owner is not None:
            for i, description in enumerate(owner.descriptions, 1):
                if description.canonical == pair.d_star:
                    index = i
                    break
    return ScoringRequest(pair.d, pair.d_star, pair.symbol, index)


def fit_thresholds(
    pairs: Sequence,
    scorer: ScorerKind,
    mode: str,
    spec: Optional[TaskSpec] = None,
    client: Optional[httpx.Client] = None,
) -> tuple[Thresholds, float]:
    """Thresholds maximizing classification accuracy on labeled pairs.

    Every candidate cut point is evaluated directly and also used as a
    Nelder-Mead restart, so the piecewise-constant objective cannot trap the
    search: the binary optimum is exact.
    """
    if mode not in ("binary", "multiclass"):
        raise VocabBridgeError(f"unknown classification mode {mode!r}")
    if not pairs:
        raise EmptyDataset()
    results = score_pairs(scorer, [request_for_pair(spec, p) for p in pairs], spec, client)

    # Categorical results ignore thresholds; their accuracy is a constant.
    fixed_correct = 0
    scored: list[tuple[float, Category]] = []
    for pair, result in zip(pairs, results):
        if result.direct_category is not None:
            predicted = result.direct_category
            if mode == "binary":
                fixed_correct += predicted.positive == pair.category.positive
            else:
                fixed_correct += predicted == pair.category
        else:
            scored.append((result.score, pair.category))
    total = len(pairs)

    if not scored:
        return DEFAULT_THRESHOLDS, fixed_correct / total

    if mode == "binary":
        best_t, best_correct = _fit_binary(scored, fixed_correct)
        thresholds = Thresholds(binary=best_t, multiclass=(1.0, best_t, best_t, best_t))
        return thresholds, best_correct / total
    best_multi, best_correct = _fit_multiclass(scored, fixed_correct)
    return Thresholds(binary=best_multi[2], multiclass=best_multi), best_correct / total


def _binary_candidates(scores: list[float]) -> list[float]:
    distinct = sorted(set(scores))
    candidates = [0.0]
    candidates += [(a + b) / 2 for a, b in zip(distinct, distinct[1:])]
    top = distinct[-1]
    candidates.append((top + 1.0) / 2 if top < 1.0 else 1.0)
    return candidates


def _fit_binary(scored: list[tuple[float, Category]], fixed_correct: int) -> tuple[float, int]:
    ordered = sorted(scored, key=lambda entry: entry[0])
    scores = [s for s, _ in ordered]
    # positives_up_to[i] = positive labels among the i lowest scores
    positives_up_to = [0]
    for _, category in ordered:
        positives_up_to.append(positives_up_to[-1] + category.positive)
    total_positive = positives_up_to[-1]
    n = len(ordered)

    def correct_at(t: float) -> int:
        split = bisect_left(scores, t)
        negatives_below = split - positives_up_to[split]
        positives_at_or_above = total_positive - positives_up_to[split]
        return fixed_correct + negatives_below + positives_at_or_above

    best_t, best_correct = 0.0, -1
    for candidate in _binary_candidates(scores):
        achieved = correct_at(candidate)
        if achieved > best_correct:
            best_t, best_correct = candidate, achieved

    for start in _binary_candidates(scores):
        outcome = minimize(
            lambda x: -correct_at(min(1.0, max(0.0, x[0]))),
            [start],
            method="Nelder-Mead",
        )
        refined = min(1.0, max(0.0, float(outcome.x[0])))
        achieved = correct_at(refined)
        if achieved > best_correct:
            best_t, best_correct = refined, achieved
    return best_t, best_correct


_COARSE_LATTICE = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)


def _fit_multiclass(
    scored: list[tuple[float, Category]], fixed_correct: int
) -> tuple[tuple[float, float, float, float], int]:
    def correct_at(cuts: tuple[float, float, float, float]) -> int:
        t1, t2, t3, t4 = cuts
        achieved = fixed_correct
        for score, label in scored:
            if score >= t1:
                predicted = Category.C1
            elif score >= t2:
                predicted = Category.C2
            elif score >= t3:
                predicted = Category.C3
            elif score >= t4:
                predicted = Category.C4
            else:
                predicted = Category.C5
            achieved += predicted == label
        return achieved

    def as_cuts(vector) -> tuple[float, float, float, float]:
        clipped = [min(1.0, max(0.0, float(v))) for v in vector]
        t1, t2, t3, t4 = sorted(clipped, reverse=True)
        return (t1, t2, t3, t4)

    lattice = [
        (t1, t2, t3, t4)
        for t1 in _COARSE_LATTICE
        for t2 in _COARSE_LATTICE
        if t2 <= t1
        for t3 in _COARSE_LATTICE
        if t3 <= t2
        for t4 in _COARSE_LATTICE
        if t4 <= t3
    ]
    best_cuts, best_correct = lattice[0], -1
    for point in lattice:
        achieved = correct_at(point)
        if achieved > best_correct:
            best_cuts, best_correct = point, achieved
    for point in lattice:
        outcome = minimize(
            lambda x: -correct_at(as_cuts(x)), list(point), method="Nelder-Mead"
        )
        refined = as_cuts(outcome.x)
        achieved = correct_at(refined)
        if achieved > best_correct:
            best_cuts, best_correct = refined, achieved
    return best_cuts, best_correct
