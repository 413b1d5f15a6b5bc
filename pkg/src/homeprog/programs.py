"""Activity-program data model and the step DSL.

A program is an ordered sequence of steps; each step is an action token with
0-2 object mentions, written one per line as ``[Action] <CLASS> (id)``.
Instance ids are per-class co-reference counters.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from .errors import ArityError, ProgramSyntaxError, UnknownActionError


class Action(Enum):
    WALK = ("Walk", 1)
    RUN = ("Run", 1)
    GRAB = ("Grab", 1)
    SWITCH_ON = ("SwitchOn", 1)
    SWITCH_OFF = ("SwitchOff", 1)
    OPEN = ("Open", 1)
    CLOSE = ("Close", 1)
    PUT = ("Put", 2)
    LOOK_AT = ("LookAt", 1)
    SIT = ("Sit", 1)
    STAND_UP = ("StandUp", 0)
    TOUCH = ("Touch", 1)

    def __init__(self, symbol: str, arity: int):
        self.symbol = symbol
        self.arity = arity


# Crowd-sourced programs mix several spellings for the same executable action.
ACTION_ALIASES = {
    "watch": Action.LOOK_AT,
    "place": Action.PUT,
    "lookat": Action.LOOK_AT,
    "switchon": Action.SWITCH_ON,
    "switchoff": Action.SWITCH_OFF,
    "standup": Action.STAND_UP,
}

_ACTION_LOOKUP: dict[str, Action] = {a.symbol.lower(): a for a in Action}
_ACTION_LOOKUP.update(ACTION_ALIASES)


@dataclass(frozen=True)
class ObjectMention:
    class_name: str
    instance_id: int

    def __post_init__(self):
        object.__setattr__(self, "class_name", self.class_name.upper())

    def __str__(self) -> str:
        return f"<{self.class_name}> ({self.instance_id})"


@dataclass(frozen=True)
class Step:
    """One instruction. ``action`` is None for archive-mode steps whose token
    lies outside the 12-action executable vocabulary; the original token (or
    raw line) is kept in ``raw_action``."""

    action: Action | None
    objects: tuple[ObjectMention, ...] = ()
    raw_action: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))

    @property
    def executable(self) -> bool:
        return self.action is not None

    def format(self) -> str:
        head = self.action.symbol if self.action is not None else self.raw_action
        parts = [f"[{head}]"] + [str(o) for o in self.objects]
        return " ".join(parts)


@dataclass(frozen=True)
class Program:
    steps: tuple[Step, ...] = ()
    name: str | None = field(default=None, compare=False)
    source_id: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class Issue:
    code: str
    severity: str  # "error" | "warning"
    step_index: int
    message: str


_LINE_RE = re.compile(r"\s*\[\s*([A-Za-z_][A-Za-z0-9_]*)\s*\]\s*(.*?)\s*$")
_OBJ_RE = re.compile(r"<\s*([A-Za-z_][A-Za-z0-9_]*)\s*>\s*\(\s*(\d+)\s*\)\s*")


def _parse_objects(rest: str, line_no: int) -> tuple[ObjectMention, ...]:
    objects = []
    pos = 0
    while pos < len(rest):
        m = _OBJ_RE.match(rest, pos)
        if m is None:
            raise ProgramSyntaxError(
                line_no, f"expected '<CLASS> (id)' at: {rest[pos:]!r}"
            )
        instance_id = int(m.group(2))
        if instance_id < 1:
            raise ProgramSyntaxError(line_no, "instance id must be >= 1")
        objects.append(ObjectMention(m.group(1), instance_id))
        pos = m.end()
    return tuple(objects)


def parse_step(line: str, line_no: int = 1, archive: bool = False) -> Step:
    m = _LINE_RE.match(line)
    if m is None:
        raise ProgramSyntaxError(line_no, "expected '[Action] <CLASS> (id) ...'")
    token, rest = m.group(1), m.group(2)
    objects = _parse_objects(rest, line_no)
    action = _ACTION_LOOKUP.get(token.lower())
    if action is None:
        if archive:
            return Step(None, objects, raw_action=token)
        raise UnknownActionError(line_no, token)
    if len(objects) != action.arity:
        raise ArityError(line_no, action.symbol, action.arity, len(objects))
    return Step(action, objects)


def parse_program(text: str, archive: bool = False, name: str | None = None) -> Program:
    """Parse the multi-line DSL. Blank lines and ``#`` comments are ignored.

    With ``archive=True``, actions outside the executable vocabulary are kept
    as non-executable steps instead of raising UnknownActionError.
    """
    steps = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        steps.append(parse_step(line, line_no, archive=archive))
    return Program(tuple(steps), name=name)


def parse_program_lenient(text: str) -> Program:
    """Archive-mode parse that additionally keeps syntactically broken lines
    as opaque non-executable steps, so sequence metrics stay defined."""
    steps = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            steps.append(parse_step(line, line_no, archive=True))
        except ProgramSyntaxError:
            steps.append(Step(None, (), raw_action=stripped))
    return Program(tuple(steps))


def format_program(p: Program) -> str:
    """Canonical textual form; inverse of parse_program on valid programs."""
    return "\n".join(s.format() for s in p.steps)


def canonicalize_ids(p: Program) -> Program:
    """Renumber instance ids per class as 1,2,... in order of first
    appearance, preserving the co-reference partition."""
    remap: dict[tuple[str, int], int] = {}
    next_id: dict[str, int] = {}
    new_steps = []
    for step in p.steps:
        objs = []
        for o in step.objects:
            key = (o.class_name, o.instance_id)
            if key not in remap:
                next_id[o.class_name] = next_id.get(o.class_name, 0) + 1
                remap[key] = next_id[o.class_name]
            objs.append(ObjectMention(o.class_name, remap[key]))
        new_steps.append(Step(step.action, tuple(objs), raw_action=step.raw_action))
    return Program(tuple(new_steps), name=p.name, source_id=p.source_id)


def validate(p: Program) -> list[Issue]:
    """Static checks that do not execute the program."""
    issues: list[Issue] = []
    prev: Step | None = None
    for i, step in enumerate(p.steps):
        if step.action is not None and len(step.objects) != step.action.arity:
            issues.append(
                Issue(
                    "ARITY",
                    "error",
                    i,
                    f"{step.action.symbol} takes {step.action.arity} object(s), "
                    f"got {len(step.objects)}",
                )
            )
        if step.action is None:
            issues.append(
                Issue(
                    "UNKNOWN_ACTION",
                    "warning",
                    i,
                    f"non-executable action {step.raw_action!r}",
                )
            )
        for o in step.objects:
            if o.instance_id < 1:
                issues.append(
                    Issue("BAD_ID", "error", i, f"instance id {o.instance_id} < 1")
                )
        if prev is not None and prev == step:
            issues.append(
                Issue("DUPLICATE_STEP", "warning", i, "identical consecutive steps")
            )
        prev = step
    return issues


def mentions(p: Program) -> list[tuple[str, int]]:
    """Distinct (class, id) mentions in order of first appearance."""
    seen: dict[tuple[str, int], None] = {}
    for step in p.steps:
        for o in step.objects:
            seen.setdefault((o.class_name, o.instance_id), None)
    return list(seen)


def step(action: Action, *objs: tuple[str, int] | ObjectMention) -> Step:
    """Convenience constructor used by fixtures and the generator."""
    ms = tuple(o if isinstance(o, ObjectMention) else ObjectMention(*o) for o in objs)
    return Step(action, ms)
