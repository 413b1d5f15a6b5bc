"""Evaluation harness: score aligned predictions with the scoring toolkit's
batch `score` command and aggregate per-method accuracy columns."""
from __future__ import annotations

import csv
import json
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .data import Record


class AlignmentError(Exception):
    pass


@dataclass
class MethodResult:
    method: str
    action: float
    objects: float
    steps: float
    mean: float
    executability: float

    def row(self) -> list:
        return [self.method, f"{self.action:.3f}", f"{self.objects:.3f}",
                f"{self.steps:.3f}", f"{self.mean:.3f}", f"{self.executability:.3f}"]


def _write_manifest(path: Path, records: list[Record],
                    programs: dict[str, list[str]] | None = None) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            doc = {
                "id": r.id,
                "description": r.description,
                "program": r.program if programs is None else programs[r.id],
                "split": r.split,
            }
            f.write(json.dumps(doc, sort_keys=True) + "\n")


def score_predictions(predictions: dict[str, list[str]], gt: list[Record],
                      env: str = "demo_home", seed: int = 0) -> list[dict]:
    """One score report per ground-truth record, in record order."""
    missing = [r.id for r in gt if r.id not in predictions]
    if missing:
        raise AlignmentError(f"missing predictions for ids: {missing[:5]}")
    with tempfile.TemporaryDirectory() as tmp:
        pred_path = Path(tmp) / "pred.jsonl"
        gt_path = Path(tmp) / "gt.jsonl"
        _write_manifest(pred_path, gt, predictions)
        _write_manifest(gt_path, gt)
        proc = subprocess.run(
            ["homeprog", "score", "--pred", str(pred_path), "--gt", str(gt_path),
             "--env", env, "--prep", "--seed", str(seed)],
            capture_output=True, text=True, timeout=1800,
        )
    if proc.returncode != 0:
        raise RuntimeError(f"scoring failed: {proc.stderr}")
    return [json.loads(line) for line in proc.stdout.splitlines()]


def evaluate_method(method: str, predictions: dict[str, list[str]],
                    gt: list[Record], env: str = "demo_home") -> MethodResult:
    reports = score_predictions(predictions, gt, env)
    n = len(reports)
    action = sum(r["action_acc"] for r in reports) / n
    objects = sum(r["object_acc"] for r in reports) / n
    steps = sum(r["step_acc"] for r in reports) / n
    execu = sum(1.0 for r in reports if r["executable"]) / n
    return MethodResult(method, action, objects, steps,
                        (action + objects + steps) / 3, execu)


HEADER = ["method", "action", "objects", "steps", "mean", "executability"]


def write_csv(results: list[MethodResult], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(HEADER)
        for r in results:
            writer.writerow(r.row())


def format_table(results: list[MethodResult]) -> str:
    rows = [HEADER] + [r.row() for r in results]
    widths = [max(len(row[i]) for row in rows) for i in range(len(HEADER))]
    return "\n".join(
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)) for row in rows
    )
