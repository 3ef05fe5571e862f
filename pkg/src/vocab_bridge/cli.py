"""Command line front end: spec validation, dataset generation, threshold
fitting, evaluation, attempt checking, and the HTTP service runner.

Exit codes: 0 success or accepted attempt, 1 rejected attempt or failed
validation, 2 command usage error, 3 I/O or scorer failure.
"""
from __future__ import annotations

import json
import os
import sys
from pathlib import Path
from typing import NoReturn, Optional

import click

from .checker import ACCEPTED, attempt_from_payload, check_solution, verdict_payload
from .dataset import generate_dataset, read_dataset, write_dataset
from .errors import VocabBridgeError
from .matcher import map_attempt
from .reports import evaluate_dataset
from .similarity import (
    DEFAULT_THRESHOLDS,
    SCORER_URL_ENV,
    ScorerKind,
    Thresholds,
    default_scorer,
    fit_thresholds,
)
from .taskspec import TaskSpec, parse_task_spec, validate_spec

_MODES = {"binary": "binary", "multi": "multiclass"}


def _fail(message: str) -> NoReturn:
    click.echo(f"error: {message}", err=True)
    sys.exit(3)


def _load_spec(path: Path) -> TaskSpec:
    try:
        return parse_task_spec(path.read_text(encoding="utf-8"), base_dir=path.parent)
    except (OSError, VocabBridgeError) as exc:
        _fail(str(exc))


def _load_dataset(path: Path):
    try:
        return read_dataset(path)
    except (OSError, VocabBridgeError) as exc:
        _fail(str(exc))


def _resolve_scorer(name: str, spec: Optional[TaskSpec]) -> ScorerKind:
    if name == "lexical":
        return ScorerKind.lexical()
    if name == "grammar":
        if spec is None:
            raise click.UsageError("the grammar scorer needs --spec <task.xml>")
        return ScorerKind.grammar()
    endpoint = os.environ.get(SCORER_URL_ENV)
    if not endpoint:
        raise click.UsageError(f"the remote scorer needs {SCORER_URL_ENV} set")
    return ScorerKind.remote(endpoint)


def _write_thresholds(path: Path, thresholds: Thresholds) -> None:
    payload = {"binary": thresholds.binary, "multiclass": list(thresholds.multiclass)}
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def _read_thresholds(path: Path) -> Thresholds:
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
        return Thresholds(payload["binary"], tuple(payload["multiclass"]))
    except (OSError, ValueError, KeyError, TypeError, VocabBridgeError) as exc:
        _fail(f"{path}: bad thresholds file: {exc}")


def _render_verdict(payload: dict) -> str:
    lines = [payload["status"]]
    for row in payload["per_symbol"]:
        target = row["matched"] if row["matched"] is not None else "-"
        lines.append(
            f"  {row['name']} -> {target}  {row['category']}  {row['score']:.2f}"
        )
    for name, text in payload["symbol_feedback"].items():
        lines.append(f"  {name}: {text}")
    for group in payload["duplicates"]:
        students = ", ".join(group["students"])
        lines.append(f"  {students}: all describe {group['potential']}")
    for text in payload["faults_fired"]:
        lines.append(f"fault: {text}")
    for text in payload["suggestions_fired"]:
        lines.append(f"suggestion: {text}")
    return "\n".join(lines)


@click.group()
def main() -> None:
    """Vocabulary design tasks: grade attempts, fit scorers, serve over HTTP."""


@main.command()
@click.argument("spec_path", metavar="SPEC", type=click.Path(exists=True, dir_okay=False, path_type=Path))
def validate(spec_path: Path) -> None:
    """Parse a task spec and report consistency diagnostics."""
    spec = _load_spec(spec_path)
    diagnostics = validate_spec(spec)
    if not diagnostics:
        click.echo(f"ok: {spec.task_id} ({spec.logic}, {len(spec.symbols)} symbols)")
        return
    for diagnostic in diagnostics:
        click.echo(f"{diagnostic.code}: {diagnostic.message}")
    sys.exit(1)


@main.command()
@click.argument("spec_path", metavar="SPEC", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", required=True, type=click.Path(dir_okay=False, path_type=Path))
@click.option("--seed", required=True, type=int)
@click.option("--eval-fraction", required=True,
              type=click.FloatRange(0.0, 1.0, min_open=True, max_open=True))
@click.option("--cross-pair", is_flag=True, default=False,
              help="Also pair descriptions against the other symbols as negatives.")
def gen(spec_path: Path, out: Path, seed: int, eval_fraction: float, cross_pair: bool) -> None:
    """Generate a labeled dataset from a task spec's grammars."""
    spec = _load_spec(spec_path)
    try:
        pairs = generate_dataset(spec, seed=seed, eval_fraction=eval_fraction, cross_pair=cross_pair)
        write_dataset(pairs, out)
    except (OSError, VocabBridgeError) as exc:
        _fail(str(exc))
    n_eval = sum(p.split == "eval" for p in pairs)
    click.echo(f"wrote {len(pairs)} pairs ({n_eval} eval) to {out}")


@main.command()
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--scorer", required=True, type=click.Choice(["lexical", "grammar", "remote"]))
@click.option("--mode", required=True, type=click.Choice(sorted(_MODES)))
@click.option("--spec", "spec_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", required=True, type=click.Path(dir_okay=False, path_type=Path))
def fit(dataset: Path, scorer: str, mode: str, spec_path: Optional[Path], out: Path) -> None:
    """Fit classification thresholds on a labeled dataset."""
    spec = _load_spec(spec_path) if spec_path else None
    pairs = _load_dataset(dataset)
    backend = _resolve_scorer(scorer, spec)
    try:
        thresholds, accuracy = fit_thresholds(pairs, backend, _MODES[mode], spec=spec)
        _write_thresholds(out, thresholds)
    except (OSError, VocabBridgeError) as exc:
        _fail(str(exc))
    cuts = " ".join(f"{t:g}" for t in thresholds.multiclass)
    click.echo(f"binary threshold: {thresholds.binary:g}")
    click.echo(f"multiclass thresholds: {cuts}")
    click.echo(f"training accuracy: {accuracy:.4f}")
    click.echo(f"wrote {out}")


@main.command("eval")
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--scorer", required=True, type=click.Choice(["lexical", "grammar", "remote"]))
@click.option("--thresholds", "thresholds_path", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--mode", type=click.Choice(sorted(_MODES)), default="multi",
              help="Kept for symmetry with fit; both tables are always printed.")
@click.option("--spec", "spec_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--split", type=click.Choice(["train", "eval"]),
              help="Restrict to one side of the split; default evaluates all pairs.")
def eval_(dataset: Path, scorer: str, thresholds_path: Path, mode: str,
          spec_path: Optional[Path], split: Optional[str]) -> None:
    """Score a labeled dataset and print both report tables."""
    spec = _load_spec(spec_path) if spec_path else None
    pairs = _load_dataset(dataset)
    backend = _resolve_scorer(scorer, spec)
    thresholds = _read_thresholds(thresholds_path)
    try:
        binary, multi = evaluate_dataset(pairs, backend, thresholds, spec=spec, split=split)
    except (OSError, VocabBridgeError) as exc:
        _fail(str(exc))
    click.echo(binary.render())
    click.echo("")
    click.echo(multi.render())


@main.command()
@click.argument("spec_path", metavar="SPEC", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("attempt_path", metavar="ATTEMPT", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--json", "as_json", is_flag=True, default=False,
              help="Print the verdict as JSON instead of a table.")
def check(spec_path: Path, attempt_path: Path, as_json: bool) -> None:
    """Grade one attempt against a task spec and print the verdict."""
    spec = _load_spec(spec_path)
    try:
        document = json.loads(attempt_path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        _fail(f"{attempt_path}: {exc}")
    try:
        attempt = attempt_from_payload(document)
        mapping = map_attempt(attempt, spec, default_scorer(spec), DEFAULT_THRESHOLDS)
        payload = verdict_payload(check_solution(mapping, spec))
    except VocabBridgeError as exc:
        _fail(str(exc))
    if as_json:
        click.echo(json.dumps(payload, ensure_ascii=False))
    else:
        click.echo(_render_verdict(payload))
    if payload["status"] != ACCEPTED:
        sys.exit(1)


@main.command()
@click.option("--port", required=True, type=click.IntRange(1, 65535))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data-dir", required=True, envvar="VOCAB_BRIDGE_DATA_DIR",
              type=click.Path(file_okay=False, path_type=Path))
def serve(port: int, host: str, data_dir: Path) -> None:
    """Run the HTTP task service."""
    import uvicorn

    from .service import create_app

    try:
        app = create_app(data_dir)
    except (OSError, VocabBridgeError) as exc:
        _fail(str(exc))
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
