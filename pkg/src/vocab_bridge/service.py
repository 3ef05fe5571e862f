"""HTTP task service: publish tasks, grade attempts, keep an append-only log.

Verdict computation is stateless per request; the only shared mutable state
is the per-task attempt log, serialized through one writer lock.  Records are
persisted before the response is sent, so the log never undercounts answered
submissions.
"""
from __future__ import annotations

import json
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from fastapi import Body, FastAPI, HTTPException

from .checker import attempt_from_payload, check_solution, verdict_payload
from .errors import ScorerUnavailable, VocabBridgeError
from .matcher import map_attempt
from .similarity import DEFAULT_THRESHOLDS, default_scorer
from .taskspec import TaskSpec, parse_task_spec

DATA_DIR_ENV = "VOCAB_BRIDGE_DATA_DIR"


def canonical_json(payload: Any) -> str:
    """Stable serialization for persisted records and replay comparisons."""
    return json.dumps(payload, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def utc_timestamp() -> str:
    """Current time as RFC 3339 UTC with a Z designator."""
    now = datetime.now(timezone.utc)
    return now.isoformat(timespec="seconds").replace("+00:00", "Z")


def create_app(data_dir: Path | str) -> FastAPI:
    """Build the service around a data directory of task specs and logs.

    Every *.xml file in the directory is loaded as a task at startup; grammar
    file references inside specs are resolved relative to the directory.
    """
    root = Path(data_dir)
    root.mkdir(parents=True, exist_ok=True)
    app = FastAPI(title="vocab-bridge", docs_url=None, redoc_url=None)
    tasks: dict[str, TaskSpec] = {}
    write_lock = threading.Lock()

    for path in sorted(root.glob("*.xml")):
        spec = parse_task_spec(path.read_text(encoding="utf-8"), base_dir=root)
        tasks[spec.task_id] = spec

    def task_or_404(task_id: str) -> TaskSpec:
        spec = tasks.get(task_id)
        if spec is None:
            raise HTTPException(404, f"no task {task_id!r}")
        return spec

    def log_path(task_id: str) -> Path:
        return root / f"{task_id}.attempts.jsonl"

    @app.post("/v1/tasks")
    def create_task(document: bytes = Body(..., media_type="application/xml")) -> dict:
        try:
            spec = parse_task_spec(document.decode("utf-8"), base_dir=root)
        except (UnicodeDecodeError, VocabBridgeError) as exc:
            raise HTTPException(422, str(exc))
        if spec.task_id in tasks:
            raise HTTPException(409, f"task {spec.task_id!r} already exists")
        (root / f"{spec.task_id}.xml").write_bytes(document)
        tasks[spec.task_id] = spec
        return {"task_id": spec.task_id}

    @app.get("/v1/tasks")
    def list_tasks() -> list[dict]:
        return [
            {"task_id": task_id, "logic": tasks[task_id].logic}
            for task_id in sorted(tasks)
        ]

    @app.get("/v1/tasks/{task_id}")
    def get_task(task_id: str) -> dict:
        # Scenario and logic only: grammars, conditions and feedback texts
        # are solution data and stay server-side.
        spec = task_or_404(task_id)
        return {"task_id": spec.task_id, "logic": spec.logic, "scenario": spec.scenario}

    @app.post("/v1/tasks/{task_id}/attempts")
    def submit_attempt(task_id: str, payload: Any = Body(...)) -> dict:
        spec = task_or_404(task_id)
        try:
            attempt = attempt_from_payload(payload)
            mapping = map_attempt(attempt, spec, default_scorer(spec), DEFAULT_THRESHOLDS)
            verdict = verdict_payload(check_solution(mapping, spec))
        except ScorerUnavailable as exc:
            raise HTTPException(503, str(exc))
        except VocabBridgeError as exc:
            raise HTTPException(422, str(exc))
        record = {
            "task_id": task_id,
            "timestamp": utc_timestamp(),
            "attempt": payload,
            "verdict": verdict,
        }
        with write_lock:
            with log_path(task_id).open("a", encoding="utf-8") as handle:
                handle.write(canonical_json(record) + "\n")
        return verdict

    @app.get("/v1/tasks/{task_id}/attempts")
    def list_attempts(task_id: str) -> list[dict]:
        task_or_404(task_id)
        path = log_path(task_id)
        if not path.exists():
            return []
        with path.open(encoding="utf-8") as handle:
            return [json.loads(line) for line in handle]

    return app
