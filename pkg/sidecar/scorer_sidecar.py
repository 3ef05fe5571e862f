"""Standalone description-similarity scorer speaking the remote wire protocol.

GET /v1/health        -> {"status": "ok"}
POST /v1/score        -> {"scores": [...]}, one score in [0, 1] per request
                         pair, response order matching request order.

The backend is pluggable.  The default fallback backend needs no model: it
scores identical strings 1.0 and everything else with a keyed-hash
pseudo-similarity, bit-reproducible for a fixed seed.  An embedding backend
wraps any sentence-encoder callable and maps cosine similarity affinely onto
[0, 1].  Either way the wire contract is the same, which is all clients may
rely on.

Run with:  uvicorn scorer_sidecar:app --port 8732
"""
from __future__ import annotations

import hashlib
import math
import os
from typing import Callable, Protocol, Sequence

from fastapi import FastAPI, HTTPException, Request

SEED_ENV = "SCORER_SIDECAR_SEED"


class Backend(Protocol):
    def score_batch(self, pairs: Sequence[tuple[str, str]]) -> list[float]: ...


class FallbackBackend:
    """Deterministic stand-in for a real model.

    score(x, x) = 1.0; any other pair hashes (seed, left, right) to a value
    in [0, 1).  No smoothness, no semantics, but stable across runs and
    platforms, which is what protocol tests need.
    """

    def __init__(self, seed: int = 0) -> None:
        self.seed = seed

    def score_batch(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        return [self._score(left, right) for left, right in pairs]

    def _score(self, left: str, right: str) -> float:
        if left == right:
            return 1.0
        digest = hashlib.blake2b(
            f"{left}\x1f{right}".encode("utf-8"),
            key=str(self.seed).encode("utf-8"),
            digest_size=8,
        ).digest()
        return int.from_bytes(digest, "big") / 2**64


class EmbeddingBackend:
    """Cosine similarity of injected sentence embeddings, mapped to [0, 1]."""

    def __init__(self, encode: Callable[[list[str]], Sequence[Sequence[float]]]) -> None:
        self.encode = encode

    def score_batch(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        texts = [text for pair in pairs for text in pair]
        vectors = self.encode(texts)
        scores = []
        for i in range(0, len(vectors), 2):
            cosine = _cosine(vectors[i], vectors[i + 1])
            scores.append(min(1.0, max(0.0, (cosine + 1.0) / 2.0)))
        return scores


def _cosine(u: Sequence[float], v: Sequence[float]) -> float:
    dot = sum(a * b for a, b in zip(u, v))
    norm = math.sqrt(sum(a * a for a in u)) * math.sqrt(sum(b * b for b in v))
    if norm == 0.0:
        return 0.0
    return dot / norm


def _parse_pairs(payload) -> list[tuple[str, str]]:
    if not isinstance(payload, dict) or not isinstance(payload.get("pairs"), list):
        raise HTTPException(status_code=400, detail="body must be {\"pairs\": [...]}")
    pairs = []
    for i, row in enumerate(payload["pairs"]):
        if (
            not isinstance(row, dict)
            or not isinstance(row.get("left"), str)
            or not isinstance(row.get("right"), str)
        ):
            raise HTTPException(
                status_code=400,
                detail=f"pairs[{i}] must be {{\"left\": str, \"right\": str}}",
            )
        pairs.append((row["left"], row["right"]))
    return pairs


def create_app(backend: Backend | None = None) -> FastAPI:
    if backend is None:
        backend = FallbackBackend(seed=int(os.environ.get(SEED_ENV, "0")))
    app = FastAPI(title="scorer-sidecar", docs_url=None, redoc_url=None)

    @app.get("/v1/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/v1/score")
    async def score(request: Request) -> dict:
        try:
            payload = await request.json()
        except Exception:
            raise HTTPException(status_code=400, detail="body must be JSON")
        pairs = _parse_pairs(payload)
        try:
            scores = backend.score_batch(pairs)
        except Exception as exc:
            raise HTTPException(status_code=500, detail=f"backend failure: {exc}")
        return {"scores": scores}

    return app


app = create_app()
