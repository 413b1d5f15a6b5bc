"""Placement knowledge base and the scene-preparation pass.

Before execution, every object class a program mentions must exist in the
environment with at least as many instances as the highest instance id used.
Missing instances are inserted on a plausible support drawn from the KB.
"""
from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field

from . import programs as prog
from .environment import Environment, ObjectInstance, query_instances
from .errors import NoSupportAvailableError, SchemaError, UnknownClassError

__all__ = ["SupportRule", "PlacementKB", "load_kb", "load_kb_file", "sample_support", "prepare_scene"]


@dataclass(frozen=True)
class SupportRule:
    support_class: str
    kind: str  # ON_TOP | INSIDE
    weight: float


@dataclass
class PlacementKB:
    entries: dict[str, list[SupportRule]]
    default_properties: dict[str, set[str]] = field(default_factory=dict)
    default_states: dict[str, set[str]] = field(default_factory=dict)


def load_kb(doc: dict) -> PlacementKB:
    entries: dict[str, list[SupportRule]] = {}
    props: dict[str, set[str]] = {}
    states: dict[str, set[str]] = {}
    for cls, spec in doc.items():
        cls = cls.upper()
        rules = []
        for i, s in enumerate(spec.get("supports", [])):
            w = s.get("weight", 1.0)
            if w <= 0:
                raise SchemaError(f"{cls}.supports[{i}].weight", "must be positive")
            if s.get("kind") not in ("ON_TOP", "INSIDE"):
                raise SchemaError(f"{cls}.supports[{i}].kind", "expected ON_TOP or INSIDE")
            rules.append(SupportRule(str(s["class"]).upper(), s["kind"], float(w)))
        if not rules:
            raise SchemaError(f"{cls}.supports", "at least one support required")
        entries[cls] = rules
        props[cls] = set(spec.get("properties", []))
        states[cls] = set(spec.get("states", []))
    return PlacementKB(entries, props, states)


def load_kb_file(path) -> PlacementKB:
    with open(path, encoding="utf-8") as f:
        return load_kb(json.load(f))


def sample_support(
    kb: PlacementKB, class_name: str, env: Environment, rng: random.Random
) -> tuple[int, str]:
    """Pick a (support uid, relation kind) for a new instance of the class.

    Support classes with no instances in the environment are skipped; among
    the rest, the class is drawn by normalized weight and the concrete
    instance is the first in query_instances order.
    """
    rules = kb.entries.get(class_name.upper())
    if rules is None:
        raise UnknownClassError(class_name)
    available = [r for r in rules if query_instances(env, r.support_class)]
    if not available:
        raise NoSupportAvailableError(class_name)
    chosen = rng.choices(available, weights=[r.weight for r in available], k=1)[0]
    uid = query_instances(env, chosen.support_class)[0]
    return uid, chosen.kind


def prepare_scene(
    env: Environment, p: prog.Program, kb: PlacementKB, seed: int = 0
) -> Environment:
    """Insert program-mentioned objects missing from the environment.

    Pre-existing instances are never touched; new uids are allocated as
    max(existing)+1 ascending, so the result is deterministic in
    (env, program, kb, seed).
    """
    out = env.copy()
    rng = random.Random(seed)
    needed: dict[str, int] = {}
    order: list[str] = []
    for cls, iid in prog.mentions(p):
        if cls not in needed:
            order.append(cls)
        needed[cls] = max(needed.get(cls, 0), iid)
    have = Counter(i.class_name for i in out.instances.values())
    next_uid = max(out.instances, default=0) + 1
    for cls in order:
        missing = needed[cls] - have.get(cls, 0)
        if missing <= 0:
            continue
        if cls not in kb.entries:
            raise UnknownClassError(cls)
        for _ in range(missing):
            support_uid, kind = sample_support(kb, cls, out, rng)
            out.instances[next_uid] = ObjectInstance(
                cls,
                next_uid,
                out.instances[support_uid].room,
                set(kb.default_properties.get(cls, set())),
                set(kb.default_states.get(cls, set())),
                (kind, support_uid),
            )
            next_uid += 1
    return out
