"""Dataset manifests (JSON Lines), deterministic splits, and corpus stats."""
from __future__ import annotations

import json
import random
import re
from collections import Counter
from dataclasses import dataclass, field, replace

from . import programs as prog
from .errors import BadRatiosError, DegenerateInputError, SchemaError

SPLITS = ("TRAIN", "VAL", "TEST")

_SENTENCE_RE = re.compile(r"[.!?]+")


@dataclass
class DatasetRecord:
    id: str
    description: str
    program: prog.Program
    name: str | None = None
    env_ref: str | None = None
    split: str = "TRAIN"


@dataclass
class DatasetStats:
    n_programs: int
    avg_steps: float
    avg_sentences: float
    avg_words: float
    action_hist: Counter = field(default_factory=Counter)
    object_hist: Counter = field(default_factory=Counter)

    def to_doc(self) -> dict:
        return {
            "n_programs": self.n_programs,
            "avg_steps": self.avg_steps,
            "avg_sentences": self.avg_sentences,
            "avg_words": self.avg_words,
            "action_hist": dict(sorted(self.action_hist.items())),
            "object_hist": dict(sorted(self.object_hist.items())),
        }


def record_to_doc(r: DatasetRecord) -> dict:
    d = {
        "id": r.id,
        "description": r.description,
        "program": [s.format() for s in r.program.steps],
        "split": r.split,
    }
    if r.name is not None:
        d["name"] = r.name
    if r.env_ref is not None:
        d["env_ref"] = r.env_ref
    return d


def record_from_doc(doc: dict, where: str) -> DatasetRecord:
    for key in ("id", "description", "program", "split"):
        if key not in doc:
            raise SchemaError(where, f"missing field {key!r}")
    if doc["split"] not in SPLITS:
        raise SchemaError(where, f"bad split {doc['split']!r}")
    try:
        # Archive mode so corpora with the full crowd action vocabulary load.
        program = prog.parse_program("\n".join(doc["program"]), archive=True)
    except Exception as e:
        raise SchemaError(where, f"unparseable program: {e}") from e
    return DatasetRecord(
        id=str(doc["id"]),
        description=str(doc["description"]),
        program=program,
        name=doc.get("name"),
        env_ref=doc.get("env_ref"),
        split=doc["split"],
    )


def save_manifest(records: list[DatasetRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(record_to_doc(r), sort_keys=True) + "\n")


def load_manifest(path) -> list[DatasetRecord]:
    records = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            where = f"{path}:{line_no}"
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as e:
                raise SchemaError(where, f"bad JSON: {e}") from e
            r = record_from_doc(doc, where)
            if r.id in seen:
                raise SchemaError(where, f"duplicate id {r.id!r}")
            seen.add(r.id)
            records.append(r)
    return records


def split_dataset(
    records: list[DatasetRecord], ratios: tuple[float, float, float], seed: int
) -> list[DatasetRecord]:
    """Assign TRAIN/VAL/TEST by a seeded shuffle; sizes match the ratios to
    within one record (largest-remainder apportionment)."""
    if len(ratios) != 3 or any(r < 0 for r in ratios):
        raise BadRatiosError(f"bad ratios {ratios!r}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise BadRatiosError(f"ratios must sum to 1.0, got {sum(ratios)}")
    n = len(records)
    exact = [n * r for r in ratios]
    counts = [int(x) for x in exact]
    remainder = n - sum(counts)
    order = sorted(range(3), key=lambda i: (-(exact[i] - counts[i]), i))
    for i in order[:remainder]:
        counts[i] += 1
    indices = list(range(n))
    random.Random(seed).shuffle(indices)
    assigned = list(records)
    pos = 0
    for split, c in zip(SPLITS, counts):
        for idx in indices[pos : pos + c]:
            assigned[idx] = replace(records[idx], split=split)
        pos += c
    return assigned


def count_sentences(text: str) -> int:
    terminals = len(_SENTENCE_RE.findall(text))
    if terminals == 0 and text.strip():
        return 1
    return terminals


def count_words(text: str) -> int:
    return len(text.split())


def compute_stats(records: list[DatasetRecord]) -> DatasetStats:
    if not records:
        raise DegenerateInputError("no records")
    action_hist: Counter = Counter()
    object_hist: Counter = Counter()
    steps = sentences = words = 0
    for r in records:
        steps += len(r.program.steps)
        sentences += count_sentences(r.description)
        words += count_words(r.description)
        for s in r.program.steps:
            action_hist[s.action.symbol if s.action else s.raw_action] += 1
            for o in s.objects:
                object_hist[o.class_name] += 1
    n = len(records)
    return DatasetStats(n, steps / n, sentences / n, words / n, action_hist, object_hist)
