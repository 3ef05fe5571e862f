"""Labeled (d, d*, category) datasets generated from task grammars.

Positive pairs come from enumerating the graded grammars; C5 pairs come from
crossing one symbol's generated descriptions with another symbol's primary
description.  The train/eval split is assigned per distinct d so no
description string leaks across splits.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .core import Category, POSITIVE_CATEGORIES
from .errors import MissingGrammar, VocabBridgeError
from .grammar import enumerate_derivations
from .taskspec import TaskSpec

SPLITS = ("train", "eval")


@dataclass(frozen=True)
class LabeledPair:
    d: str
    d_star: str
    symbol: str
    category: Category
    split: str

    def __post_init__(self) -> None:
        if self.split not in SPLITS:
            raise VocabBridgeError(f"split must be one of {SPLITS}, got {self.split!r}")


def generate_dataset(
    spec: TaskSpec,
    seed: int,
    eval_fraction: float,
    cross_pair: bool = True,
) -> list[LabeledPair]:
    """All grammar-derived pairs for a task, deterministically ordered and split."""
    if not 0.0 < eval_fraction < 1.0:
        raise VocabBridgeError(f"eval_fraction must be in (0, 1), got {eval_fraction}")
    if not any(key[2] in POSITIVE_CATEGORIES for key in spec.grammars):
        first = spec.symbols[0].name if spec.symbols else "?"
        raise MissingGrammar(first, 1, Category.C1)

    # (d, d_star, symbol) -> (category, sort key); grammar-sourced labels win
    # over cross-pair C5, and of two grammar labels the better-ranked one wins.
    chosen: dict[tuple[str, str, str], tuple[Category, tuple]] = {}

    def consider(d: str, d_star: str, symbol: str, category: Category, order: tuple) -> None:
        key = (d, d_star, symbol)
        current = chosen.get(key)
        if current is None or category.rank < current[0].rank:
            chosen[key] = (category, order)

    generated: dict[tuple[str, int, Category], list[str]] = {
        key: enumerate_derivations(grammar) for key, grammar in spec.grammars.items()
    }

    for decl_index, symbol in enumerate(spec.symbols):
        for desc_index, description in enumerate(symbol.descriptions, 1):
            for category in sorted(Category, key=lambda c: c.rank):
                strings = generated.get((symbol.name, desc_index, category))
                if strings is None:
                    continue
                for d in strings:
                    consider(
                        d,
                        description.canonical,
                        symbol.name,
                        category,
                        (decl_index, desc_index, category.rank),
                    )

    if cross_pair:
        for source_index, source in enumerate(spec.symbols):
            positives = [
                strings
                for (name, _, category), strings in generated.items()
                if name == source.name and category in POSITIVE_CATEGORIES
            ]
            if not positives:
                continue
            for target_index, target in enumerate(spec.symbols):
                if target.name == source.name:
                    continue
                target_positive = [
                    grammar
                    for (name, _, category), grammar in spec.grammars.items()
                    if name == target.name and category in POSITIVE_CATEGORIES
                ]
                for strings in positives:
                    for d in strings:
                        if any(g.accepts(d) for g in target_positive):
                            continue
                        consider(
                            d,
                            target.primary.canonical,
                            target.name,
                            Category.C5,
                            (target_index, 1, Category.C5.rank),
                        )

    split_of = _split_descriptions(
        {d for d, _, _ in chosen}, seed=seed, eval_fraction=eval_fraction
    )
    # shortlex on d (token count, then text), matching enumeration order
    ordered = sorted(
        chosen.items(),
        key=lambda item: (item[1][1], len(item[0][0].split()), item[0][0]),
    )
    return [
        LabeledPair(d, d_star, symbol, category, split_of[d])
        for (d, d_star, symbol), (category, _) in ordered
    ]


def _split_descriptions(descriptions: set[str], seed: int, eval_fraction: float) -> dict[str, str]:
    rng = random.Random(seed)
    shuffled = sorted(descriptions)
    rng.shuffle(shuffled)
    return {d: "eval" if rng.random() < eval_fraction else "train" for d in shuffled}


def write_dataset(pairs: Iterable[LabeledPair], path: Path | str) -> None:
    """One JSON object per line, UTF-8, trailing newline; byte-deterministic."""
    lines = [
        json.dumps(
            {
                "d": p.d,
                "d_star": p.d_star,
                "symbol": p.symbol,
                "category": p.category.value,
                "split": p.split,
            },
            ensure_ascii=False,
        )
        for p in pairs
    ]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def read_dataset(path: Path | str) -> list[LabeledPair]:
    pairs = []
    for line_number, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), 1
    ):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            pairs.append(
                LabeledPair(
                    d=record["d"],
                    d_star=record["d_star"],
                    symbol=record["symbol"],
                    category=Category(record["category"]),
                    split=record["split"],
                )
            )
        except (KeyError, ValueError) as exc:
            raise VocabBridgeError(f"{path}:{line_number}: bad dataset record: {exc}") from exc
    return pairs
