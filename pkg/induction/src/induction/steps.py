"""Step-string handling for the induction model.

The model predicts id-free instructions (action plus object classes); this
module parses manifest step strings into instructions and re-attaches
per-class instance ids when instructions are rendered back into a program.
The toolkit that scores programs lives behind its command-line interface, so
the tiny DSL surface needed here is reimplemented rather than imported.
"""
from __future__ import annotations

import re

# Executable action vocabulary with arities, matching the program DSL.
ACTION_ARITY = {
    "Walk": 1,
    "Run": 1,
    "Grab": 1,
    "SwitchOn": 1,
    "SwitchOff": 1,
    "Open": 1,
    "Close": 1,
    "Put": 2,
    "LookAt": 1,
    "Sit": 1,
    "StandUp": 0,
    "Touch": 1,
}

# Instruction = (action, (class, ...)). EOS is modelled as a zero-arity
# pseudo-action so it gets an ordinary embedding.
EOS_ACTION = "<EOS>"
EOS_INSTRUCTION = (EOS_ACTION, ())

_LINE_RE = re.compile(r"\s*\[\s*([A-Za-z_][A-Za-z0-9_]*)\s*\]\s*(.*?)\s*$")
_OBJ_RE = re.compile(r"<\s*([A-Za-z_][A-Za-z0-9_]*)\s*>\s*\(\s*(\d+)\s*\)\s*")


def parse_step(line: str) -> tuple[str, tuple[str, ...]]:
    """Step string -> (action, object classes), discarding instance ids."""
    m = _LINE_RE.fullmatch(line)
    if m is None:
        raise ValueError(f"malformed step: {line!r}")
    action, rest = m.group(1), m.group(2)
    classes = tuple(obj.group(1).upper() for obj in _OBJ_RE.finditer(rest))
    return action, classes


def program_to_instructions(lines: list[str]) -> list[tuple[str, tuple[str, ...]]]:
    return [parse_step(line) for line in lines]


def instructions_to_program(instructions: list[tuple[str, tuple[str, ...]]]) -> list[str]:
    """Render instructions as step strings, assigning instance ids.

    Id policy: a Walk/Run step starts a fresh mention of its target class
    (new id); any other step reuses the most recent id of that class,
    allocating id 1 if the class has not appeared yet. This reconstructs the
    co-reference pattern of episode-structured programs, where every episode
    begins by walking to a fresh object.
    """
    counters: dict[str, int] = {}
    current: dict[str, int] = {}
    lines = []
    for action, classes in instructions:
        if action == EOS_ACTION:
            break
        parts = [f"[{action}]"]
        for cls in classes:
            if action in ("Walk", "Run") or cls not in current:
                counters[cls] = counters.get(cls, 0) + 1
                current[cls] = counters[cls]
            parts.append(f"<{cls}> ({current[cls]})")
        lines.append(" ".join(parts))
    return lines
