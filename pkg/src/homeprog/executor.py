"""Grounding and execution of programs under precondition/effect semantics.

Object mentions are bound to environment instances by depth-first
backtracking over per-mention candidate lists; the search simulates
execution step by step and stops at the first complete assignment that
reaches the last step.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .environment import (
    MAX_HELD,
    SITTING,
    STANDING,
    Environment,
    StateDiff,
    diff,
    query_instances,
)
from .errors import ContractViolation, SearchBudgetExceeded
from .programs import Action, Program

EXECUTABLE = "EXECUTABLE"
FAILED = "FAILED"

OK = None


@dataclass(frozen=True)
class Violation:
    code: str
    message: str = ""


@dataclass(frozen=True)
class SearchLimits:
    max_candidates_per_mention: int = 5
    max_backtrack_nodes: int = 100_000

    def __post_init__(self):
        if self.max_candidates_per_mention < 1 or self.max_backtrack_nodes < 1:
            raise ValueError("search limits must be positive")


@dataclass(frozen=True)
class GroundingMap:
    assignment: dict  # (class_name, instance_id) -> uid


@dataclass
class TraceEntry:
    index: int
    action: str
    targets: tuple[int, ...]
    outcome: str  # "OK" or a violation code
    diff: StateDiff | None = None

    def to_doc(self) -> dict:
        return {
            "idx": self.index,
            "action": self.action,
            "targets": list(self.targets),
            "outcome": self.outcome,
            "diff": self.diff.to_doc() if self.diff is not None else None,
        }


@dataclass
class ExecutionTrace:
    entries: list[TraceEntry]
    verdict: str  # EXECUTABLE | FAILED
    failed_step: int | None
    violation: Violation | None
    final_env: Environment


def _near_covers(env: Environment, uid: int) -> bool:
    """The nearness rule used by Grab/Touch: the instance itself, or anything
    it rests on top of / inside of (containers must be open)."""
    a = env.agent
    if a.near == uid:
        return True
    inst = env.instances[uid]
    if inst.relation is None or a.near is None:
        return False
    kind, target = inst.relation
    if target != a.near:
        return False
    if kind == "INSIDE":
        return "OPEN" in env.instances[target].states
    return True


def check_step(env: Environment, action: Action, targets: list[int]):
    """Return OK (None) or the first violated precondition as a Violation."""
    a = env.agent
    if action in (Action.WALK, Action.RUN):
        if a.posture != STANDING:
            return Violation("NOT_STANDING", "agent must stand up before walking")
        return OK
    if action is Action.GRAB:
        x = targets[0]
        if x in a.held:
            return Violation("ALREADY_HELD", f"uid {x} is already in hand")
        if not _near_covers(env, x):
            return Violation("NOT_NEAR", f"agent cannot reach uid {x}")
        if "GRABBABLE" not in env.instances[x].properties:
            return Violation("MISSING_PROPERTY", f"uid {x} is not GRABBABLE")
        if len(a.held) >= MAX_HELD:
            return Violation("HANDS_FULL", "both hands are occupied")
        return OK
    if action in (Action.OPEN, Action.CLOSE):
        x = targets[0]
        if a.near != x:
            return Violation("NOT_NEAR", f"agent is not at uid {x}")
        inst = env.instances[x]
        if "OPENABLE" not in inst.properties:
            return Violation("MISSING_PROPERTY", f"uid {x} is not OPENABLE")
        want = "CLOSED" if action is Action.OPEN else "OPEN"
        if want not in inst.states:
            return Violation("WRONG_STATE", f"uid {x} is not {want}")
        if len(a.held) >= MAX_HELD:
            return Violation("HANDS_FULL", "need a free hand")
        return OK
    if action in (Action.SWITCH_ON, Action.SWITCH_OFF):
        x = targets[0]
        if a.near != x:
            return Violation("NOT_NEAR", f"agent is not at uid {x}")
        inst = env.instances[x]
        if "SWITCHABLE" not in inst.properties:
            return Violation("MISSING_PROPERTY", f"uid {x} is not SWITCHABLE")
        want = "OFF" if action is Action.SWITCH_ON else "ON"
        if want not in inst.states:
            return Violation("WRONG_STATE", f"uid {x} is not {want}")
        return OK
    if action is Action.PUT:
        x, y = targets
        if x not in a.held:
            return Violation("NOT_HELD", f"uid {x} is not in hand")
        if a.near != y:
            return Violation("NOT_NEAR", f"agent is not at uid {y}")
        tgt = env.instances[y]
        if "SURFACE" in tgt.properties:
            return OK
        if "CONTAINER" in tgt.properties:
            if "OPEN" not in tgt.states:
                return Violation("CONTAINER_CLOSED", f"uid {y} is not open")
            return OK
        return Violation("MISSING_PROPERTY", f"uid {y} is neither SURFACE nor CONTAINER")
    if action is Action.SIT:
        x = targets[0]
        if a.near != x:
            return Violation("NOT_NEAR", f"agent is not at uid {x}")
        if "SITTABLE" not in env.instances[x].properties:
            return Violation("MISSING_PROPERTY", f"uid {x} is not SITTABLE")
        if a.posture != STANDING:
            return Violation("NOT_STANDING", "agent is already sitting")
        return OK
    if action is Action.STAND_UP:
        if a.posture != SITTING:
            return Violation("NOT_SITTING", "agent is not sitting")
        return OK
    if action is Action.LOOK_AT:
        x = targets[0]
        if env.instances[x].room != a.room and x not in a.held:
            return Violation("NOT_IN_ROOM", f"uid {x} is in another room")
        return OK
    if action is Action.TOUCH:
        if not _near_covers(env, targets[0]):
            return Violation("NOT_NEAR", f"agent cannot reach uid {targets[0]}")
        return OK
    raise ContractViolation(f"no semantics for action {action!r}")


def _apply_inplace(env: Environment, action: Action, targets: list[int]) -> None:
    a = env.agent
    if action in (Action.WALK, Action.RUN):
        x = targets[0]
        a.room = env.instances[x].room
        a.near = x
        for uid in a.held:
            env.instances[uid].room = a.room
    elif action is Action.GRAB:
        x = targets[0]
        a.held.append(x)
        env.instances[x].relation = None
        env.instances[x].room = a.room
    elif action is Action.OPEN:
        st = env.instances[targets[0]].states
        st.discard("CLOSED")
        st.add("OPEN")
    elif action is Action.CLOSE:
        st = env.instances[targets[0]].states
        st.discard("OPEN")
        st.add("CLOSED")
    elif action is Action.SWITCH_ON:
        st = env.instances[targets[0]].states
        st.discard("OFF")
        st.add("ON")
    elif action is Action.SWITCH_OFF:
        st = env.instances[targets[0]].states
        st.discard("ON")
        st.add("OFF")
    elif action is Action.PUT:
        x, y = targets
        a.held.remove(x)
        tgt = env.instances[y]
        kind = "ON_TOP" if "SURFACE" in tgt.properties else "INSIDE"
        env.instances[x].relation = (kind, y)
        env.instances[x].room = tgt.room
    elif action is Action.SIT:
        a.posture = SITTING
        a.sit_on = targets[0]
    elif action is Action.STAND_UP:
        a.posture = STANDING
        a.sit_on = None
    elif action in (Action.LOOK_AT, Action.TOUCH):
        pass
    else:
        raise ContractViolation(f"no semantics for action {action!r}")


def apply_step(env: Environment, action: Action, targets: list[int]) -> Environment:
    """Pure effect application; requires check_step to have returned OK."""
    v = check_step(env, action, targets)
    if v is not None:
        raise ContractViolation(f"apply_step with failing precondition: {v.code}")
    out = env.copy()
    _apply_inplace(out, action, targets)
    return out


@dataclass
class _Best:
    depth: int = -1
    entries: list = field(default_factory=list)
    violation: Violation | None = None
    env: Environment | None = None


def ground_and_execute(
    p: Program, env: Environment, limits: SearchLimits | None = None
) -> tuple[GroundingMap | None, ExecutionTrace]:
    limits = limits or SearchLimits()
    base = env.copy()
    if not p.steps:
        return GroundingMap({}), ExecutionTrace([], EXECUTABLE, None, None, base)

    candidates: dict[tuple[str, int], list[int]] = {}
    for s in p.steps:
        for m in s.objects:
            key = (m.class_name, m.instance_id)
            if key not in candidates:
                candidates[key] = query_instances(env, m.class_name)[
                    : limits.max_candidates_per_mention
                ]

    nodes = 0
    best = _Best()
    entries: list[TraceEntry] = []

    def record_fail(idx, step, targets, violation, cur_env):
        if idx > best.depth:
            best.depth = idx
            sym = step.action.symbol if step.action else (step.raw_action or "?")
            best.entries = list(entries) + [
                TraceEntry(idx, sym, tuple(targets or ()), violation.code)
            ]
            best.violation = violation
            best.env = cur_env.copy()

    def search(idx, cur_env, assign):
        nonlocal nodes
        if idx == len(p.steps):
            return assign, cur_env
        step = p.steps[idx]
        if step.action is None:
            record_fail(
                idx, step, (), Violation("NON_EXECUTABLE_ACTION", "archive step"), cur_env
            )
            return None
        keys = [(m.class_name, m.instance_id) for m in step.objects]
        unbound = [k for k in dict.fromkeys(keys) if k not in assign]
        pools = []
        for k in unbound:
            used = {u for (c, _), u in assign.items() if c == k[0]}
            pools.append([u for u in candidates[k] if u not in used])
        if any(not pool for pool in pools):
            record_fail(
                idx, step, (), Violation("NO_INSTANCE", "no candidate instance"), cur_env
            )
            return None
        tried = False
        for combo in itertools.product(*pools):
            clash = False
            for (ka, ua), (kb, ub) in itertools.combinations(zip(unbound, combo), 2):
                if ka[0] == kb[0] and ua == ub:
                    clash = True  # injectivity within a class
                    break
            if clash:
                continue
            tried = True
            nodes += 1
            if nodes > limits.max_backtrack_nodes:
                raise SearchBudgetExceeded(
                    f"backtracking exceeded {limits.max_backtrack_nodes} nodes"
                )
            trial = dict(assign)
            trial.update(zip(unbound, combo))
            targets = [trial[k] for k in keys]
            v = check_step(cur_env, step.action, targets)
            if v is not None:
                record_fail(idx, step, targets, v, cur_env)
                continue
            nxt = cur_env.copy()
            _apply_inplace(nxt, step.action, targets)
            entries.append(
                TraceEntry(idx, step.action.symbol, tuple(targets), "OK", diff(cur_env, nxt))
            )
            res = search(idx + 1, nxt, trial)
            if res is not None:
                return res
            entries.pop()
        if not tried:
            record_fail(
                idx, step, (), Violation("NO_INSTANCE", "candidates exhausted"), cur_env
            )
        return None

    result = search(0, base, {})
    if result is not None:
        assign, final_env = result
        return GroundingMap(dict(assign)), ExecutionTrace(
            list(entries), EXECUTABLE, None, None, final_env
        )
    return None, ExecutionTrace(
        best.entries, FAILED, best.depth, best.violation, best.env or base
    )


def is_executable(
    p: Program, env: Environment, limits: SearchLimits | None = None
) -> tuple[bool, Violation | None]:
    gmap, trace = ground_and_execute(p, env, limits)
    return gmap is not None, trace.violation
