"""Manifest loading, tokenization, and the model vocabulary."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .steps import ACTION_ARITY, EOS_ACTION, EOS_INSTRUCTION, program_to_instructions


class DataError(Exception):
    pass


@dataclass
class Record:
    id: str
    description: str
    program: list[str]  # step strings as stored in the manifest
    split: str = "TRAIN"


def load_manifest(path) -> list[Record]:
    records = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as e:
                raise DataError(f"{path}:{line_no}: bad JSON: {e}") from e
            for key in ("id", "description", "program"):
                if key not in doc:
                    raise DataError(f"{path}:{line_no}: missing field {key!r}")
            records.append(
                Record(
                    id=str(doc["id"]),
                    description=str(doc["description"]),
                    program=list(doc["program"]),
                    split=doc.get("split", "TRAIN"),
                )
            )
    if not records:
        raise DataError(f"{path}: empty manifest")
    return records


def by_split(records: list[Record], split: str) -> list[Record]:
    return [r for r in records if r.split == split]


_TOKEN_RE = re.compile(r"[a-z0-9]+")

PAD, BOS, EOS, UNK = "<pad>", "<bos>", "<eos>", "<unk>"
SPECIALS = (PAD, BOS, EOS, UNK)


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


@dataclass
class Vocabulary:
    """Word, action, object, and instruction inventories built from the
    training split. Indices are dense and stable; unknown words map to UNK."""

    words: list[str]
    actions: list[str]
    objects: list[str]
    instructions: list[tuple[str, tuple[str, ...]]]
    word_index: dict[str, int] = field(default_factory=dict)
    action_index: dict[str, int] = field(default_factory=dict)
    object_index: dict[str, int] = field(default_factory=dict)
    instruction_index: dict[tuple, int] = field(default_factory=dict)

    def __post_init__(self):
        self.word_index = {w: i for i, w in enumerate(self.words)}
        self.action_index = {a: i for i, a in enumerate(self.actions)}
        self.object_index = {o: i for i, o in enumerate(self.objects)}
        self.instruction_index = {ins: i for i, ins in enumerate(self.instructions)}

    def encode_words(self, text: str) -> list[int]:
        """Token ids for the encoder; an empty description encodes as the
        single BOS token so there is always at least one encoder state."""
        unk = self.word_index[UNK]
        ids = [self.word_index.get(t, unk) for t in tokenize(text)]
        return ids or [self.word_index[BOS]]

    def encode_program(self, lines: list[str]) -> list[int]:
        """Instruction indices for the decoder target, EOS-terminated.
        Instructions outside the inventory raise DataError."""
        out = []
        for ins in program_to_instructions(lines):
            if ins not in self.instruction_index:
                raise DataError(f"instruction outside vocabulary: {ins}")
            out.append(self.instruction_index[ins])
        out.append(self.instruction_index[EOS_INSTRUCTION])
        return out

    def to_doc(self) -> dict:
        return {
            "words": self.words,
            "actions": self.actions,
            "objects": self.objects,
            "instructions": [[a, list(objs)] for a, objs in self.instructions],
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Vocabulary":
        return cls(
            words=list(doc["words"]),
            actions=list(doc["actions"]),
            objects=list(doc["objects"]),
            instructions=[(a, tuple(objs)) for a, objs in doc["instructions"]],
        )


def build_vocabulary(records: list[Record], max_instructions: int = 4000) -> Vocabulary:
    """Inventories from a training split.

    The instruction set is every (action, objects) combination realized in
    training plus all schema-valid single-object combinations over the seen
    classes, capped at max_instructions (realized combinations first).
    """
    if not records:
        raise DataError("empty training split")
    word_set: set[str] = set()
    seen_instructions: list[tuple[str, tuple[str, ...]]] = []
    seen_set: set[tuple] = set()
    object_set: set[str] = set()
    for r in records:
        word_set.update(tokenize(r.description))
        for ins in program_to_instructions(r.program):
            action, classes = ins
            if action not in ACTION_ARITY:
                raise DataError(f"unknown action in training data: {action}")
            object_set.update(classes)
            if ins not in seen_set:
                seen_set.add(ins)
                seen_instructions.append(ins)

    objects = sorted(object_set)
    instructions = [EOS_INSTRUCTION] + seen_instructions
    for action, arity in ACTION_ARITY.items():
        if arity != 1:
            continue
        for cls in objects:
            ins = (action, (cls,))
            if ins not in seen_set and len(instructions) < max_instructions:
                seen_set.add(ins)
                instructions.append(ins)
    instructions = instructions[:max_instructions]

    return Vocabulary(
        words=list(SPECIALS) + sorted(word_set),
        actions=[EOS_ACTION] + sorted(ACTION_ARITY),
        objects=objects,
        instructions=instructions,
    )
