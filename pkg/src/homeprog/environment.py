"""Symbolic model of a home: rooms, object instances, and the agent.

Loaded environments are treated as immutable; the executor mutates private
copies only. The JSON schema is documented in the README (``*.env.json``).
"""
from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field

from .errors import InvariantError, SchemaError

PROPERTIES = frozenset(
    {"GRABBABLE", "OPENABLE", "SWITCHABLE", "SURFACE", "CONTAINER", "SITTABLE"}
)
STATES = frozenset({"OPEN", "CLOSED", "ON", "OFF"})
RELATION_KINDS = frozenset({"ON_TOP", "INSIDE"})

STANDING = "STANDING"
SITTING = "SITTING"

MAX_HELD = 2  # two hands


@dataclass
class ObjectInstance:
    class_name: str
    uid: int
    room: str
    properties: set[str] = field(default_factory=set)
    states: set[str] = field(default_factory=set)
    relation: tuple[str, int] | None = None  # (kind, target uid)


@dataclass
class Agent:
    room: str
    near: int | None = None
    held: list[int] = field(default_factory=list)
    posture: str = STANDING
    sit_on: int | None = None


@dataclass
class Environment:
    name: str
    rooms: list[tuple[str, str]]  # (id, name)
    instances: dict[int, ObjectInstance]
    agent: Agent

    def copy(self) -> "Environment":
        return copy.deepcopy(self)

    def room_ids(self) -> set[str]:
        return {rid for rid, _ in self.rooms}


def _check_instance_invariants(inst: ObjectInstance, path: str) -> None:
    if "OPEN" in inst.states and "CLOSED" in inst.states:
        raise InvariantError(f"{path}: states OPEN and CLOSED are mutually exclusive")
    if "ON" in inst.states and "OFF" in inst.states:
        raise InvariantError(f"{path}: states ON and OFF are mutually exclusive")
    if ("OPEN" in inst.states or "CLOSED" in inst.states) and "OPENABLE" not in inst.properties:
        raise InvariantError(f"{path}: OPEN/CLOSED state requires OPENABLE")
    if ("ON" in inst.states or "OFF" in inst.states) and "SWITCHABLE" not in inst.properties:
        raise InvariantError(f"{path}: ON/OFF state requires SWITCHABLE")


def load_environment(doc: dict) -> Environment:
    """Build an Environment from its JSON document, verifying the schema and
    every structural invariant. Violations name the offending path."""
    if not isinstance(doc, dict):
        raise SchemaError("$", "expected an object")
    name = doc.get("name", "unnamed")

    rooms = []
    room_ids: set[str] = set()
    for i, r in enumerate(doc.get("rooms", [])):
        path = f"rooms[{i}]"
        if not isinstance(r, dict) or "id" not in r:
            raise SchemaError(path, "expected {id, name}")
        rid = str(r["id"])
        if rid in room_ids:
            raise SchemaError(path, f"duplicate room id {rid}")
        room_ids.add(rid)
        rooms.append((rid, str(r.get("name", rid))))
    if not rooms:
        raise SchemaError("rooms", "at least one room required")

    instances: dict[int, ObjectInstance] = {}
    for i, d in enumerate(doc.get("instances", [])):
        path = f"instances[{i}]"
        if not isinstance(d, dict) or "class" not in d or "uid" not in d:
            raise SchemaError(path, "expected {class, uid, room, ...}")
        uid = d["uid"]
        if not isinstance(uid, int) or uid in instances:
            raise SchemaError(f"{path}.uid", f"bad or duplicate uid {uid!r}")
        room = str(d.get("room", ""))
        if room not in room_ids:
            raise SchemaError(f"{path}.room", f"unknown room {room!r}")
        props = set(d.get("properties", []))
        if not props <= PROPERTIES:
            raise SchemaError(f"{path}.properties", f"unknown: {sorted(props - PROPERTIES)}")
        states = set(d.get("states", []))
        if not states <= STATES:
            raise SchemaError(f"{path}.states", f"unknown: {sorted(states - STATES)}")
        inst = ObjectInstance(str(d["class"]).upper(), uid, room, props, states)
        _check_instance_invariants(inst, path)
        rel = d.get("relation")
        if rel is not None:
            if not isinstance(rel, dict) or rel.get("kind") not in RELATION_KINDS:
                raise SchemaError(f"{path}.relation", "expected {kind: ON_TOP|INSIDE, target}")
            inst.relation = (rel["kind"], rel["target"])
        instances[uid] = inst

    for uid, inst in instances.items():
        if inst.relation is None:
            continue
        kind, target = inst.relation
        if target not in instances:
            raise SchemaError(f"instances[uid={uid}].relation.target", f"missing uid {target}")
        tgt = instances[target]
        if kind == "ON_TOP" and "SURFACE" not in tgt.properties:
            raise InvariantError(f"uid {uid} ON_TOP of non-SURFACE uid {target}")
        if kind == "INSIDE" and "CONTAINER" not in tgt.properties:
            raise InvariantError(f"uid {uid} INSIDE non-CONTAINER uid {target}")

    a = doc.get("agent")
    if not isinstance(a, dict) or "room" not in a:
        raise SchemaError("agent", "expected {room, ...}")
    if str(a["room"]) not in room_ids:
        raise SchemaError("agent.room", f"unknown room {a['room']!r}")
    near = a.get("near")
    if near is not None and near not in instances:
        raise SchemaError("agent.near", f"missing uid {near}")
    held = list(a.get("held", []))
    if len(held) > MAX_HELD:
        raise InvariantError(f"agent holds {len(held)} items, max {MAX_HELD}")
    for uid in held:
        if uid not in instances:
            raise SchemaError("agent.held", f"missing uid {uid}")
        if instances[uid].relation is not None:
            raise InvariantError(f"held uid {uid} must not have a spatial relation")
        if instances[uid].room != str(a["room"]):
            raise InvariantError(f"held uid {uid} must travel with the agent")
    posture = a.get("posture", STANDING)
    if posture not in (STANDING, SITTING):
        raise SchemaError("agent.posture", f"expected STANDING or SITTING, got {posture!r}")
    sit_on = a.get("sit_on")
    if posture == SITTING:
        if sit_on not in instances:
            raise SchemaError("agent.sit_on", f"missing uid {sit_on}")
        if near != sit_on:
            raise InvariantError("SITTING posture requires agent.near == agent.sit_on")
    agent = Agent(str(a["room"]), near, held, posture, sit_on)
    return Environment(str(name), rooms, instances, agent)


def to_doc(env: Environment) -> dict:
    """Serialize back to the JSON schema accepted by load_environment."""
    instances = []
    for uid in sorted(env.instances):
        inst = env.instances[uid]
        d = {
            "class": inst.class_name,
            "uid": uid,
            "room": inst.room,
            "properties": sorted(inst.properties),
            "states": sorted(inst.states),
        }
        if inst.relation is not None:
            d["relation"] = {"kind": inst.relation[0], "target": inst.relation[1]}
        instances.append(d)
    a = env.agent
    agent = {"room": a.room, "held": list(a.held), "posture": a.posture}
    if a.near is not None:
        agent["near"] = a.near
    if a.sit_on is not None:
        agent["sit_on"] = a.sit_on
    return {
        "name": env.name,
        "rooms": [{"id": rid, "name": rname} for rid, rname in env.rooms],
        "instances": instances,
        "agent": agent,
    }


def env_hash(env: Environment) -> str:
    payload = json.dumps(to_doc(env), sort_keys=True).encode()
    return hashlib.sha256(payload).hexdigest()


def load_environment_file(path) -> Environment:
    with open(path, encoding="utf-8") as f:
        return load_environment(json.load(f))


def query_instances(env: Environment, class_name: str) -> list[int]:
    """Uids of instances of the class: agent's room first, then ascending uid."""
    cls = class_name.upper()
    hits = [inst for inst in env.instances.values() if inst.class_name == cls]
    hits.sort(key=lambda i: (i.room != env.agent.room, i.uid))
    return [i.uid for i in hits]


def snapshot(env: Environment) -> Environment:
    return env.copy()


_AGENT_FIELDS = ("room", "near", "held", "posture", "sit_on")
_INSTANCE_FIELDS = ("room", "states", "relation", "properties")


def _inst_value(inst: ObjectInstance, field_name: str):
    v = getattr(inst, field_name)
    if isinstance(v, set):
        return sorted(v)
    if field_name == "relation" and v is not None:
        return [v[0], v[1]]
    return v


@dataclass
class StateDiff:
    agent: dict[str, list]  # field -> [old, new]
    instances: dict[int, dict[str, list]]
    added: list[dict]  # serialized instance docs

    def is_empty(self) -> bool:
        return not (self.agent or self.instances or self.added)

    def to_doc(self) -> dict:
        return {
            "agent": self.agent,
            "instances": {str(uid): ch for uid, ch in self.instances.items()},
            "added": self.added,
        }


def diff(a: Environment, b: Environment) -> StateDiff:
    agent_changes = {}
    for f in _AGENT_FIELDS:
        va, vb = getattr(a.agent, f), getattr(b.agent, f)
        if isinstance(va, list):
            va, vb = list(va), list(vb)
        if va != vb:
            agent_changes[f] = [va, vb]
    inst_changes: dict[int, dict[str, list]] = {}
    added = []
    for uid, inst_b in b.instances.items():
        inst_a = a.instances.get(uid)
        if inst_a is None:
            d = {
                "class": inst_b.class_name,
                "uid": uid,
                "room": inst_b.room,
                "properties": sorted(inst_b.properties),
                "states": sorted(inst_b.states),
            }
            if inst_b.relation is not None:
                d["relation"] = {"kind": inst_b.relation[0], "target": inst_b.relation[1]}
            added.append(d)
            continue
        changes = {}
        for f in _INSTANCE_FIELDS:
            va, vb = _inst_value(inst_a, f), _inst_value(inst_b, f)
            if va != vb:
                changes[f] = [va, vb]
        if changes:
            inst_changes[uid] = changes
    return StateDiff(agent_changes, inst_changes, added)


def apply_diff(env: Environment, d: StateDiff) -> Environment:
    """Replay a diff onto a copy of ``env``; inverse of ``diff`` for states
    reachable by execution (which never removes instances)."""
    out = env.copy()
    for f, (_, new) in d.agent.items():
        setattr(out.agent, f, list(new) if f == "held" else new)
    for uid, changes in d.instances.items():
        inst = out.instances[int(uid)]
        for f, (_, new) in changes.items():
            if f in ("states", "properties"):
                setattr(inst, f, set(new))
            elif f == "relation":
                inst.relation = None if new is None else (new[0], new[1])
            else:
                setattr(inst, f, new)
    for doc in d.added:
        rel = doc.get("relation")
        out.instances[doc["uid"]] = ObjectInstance(
            doc["class"],
            doc["uid"],
            doc["room"],
            set(doc.get("properties", [])),
            set(doc.get("states", [])),
            None if rel is None else (rel["kind"], rel["target"]),
        )
    return out
