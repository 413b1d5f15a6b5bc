"""Probabilistic grammar over household episodes.

Programs are sampled as short chains of episode schemata (fetch-and-place,
use an appliance, relax, fetch from a container, inspect). Every schema is
executable by construction once the scene has been prepared, which is what
makes the generated corpus usable as ground truth for the induction task.
Descriptions come from a per-episode template bank with synonym pools.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .errors import ConfigError, TemplateMissingError
from .programs import Action, ObjectMention, Program, Step, step

FETCH_PLACE = "FETCH_PLACE"
USE_APPLIANCE = "USE_APPLIANCE"
RELAX = "RELAX"
OPEN_FETCH = "OPEN_FETCH"
INSPECT = "INSPECT"

EPISODE_KINDS = (FETCH_PLACE, USE_APPLIANCE, RELAX, OPEN_FETCH, INSPECT)

# Hands the episode needs free at its start, and the net change it leaves.
_HANDS_NEEDED = {FETCH_PLACE: 1, USE_APPLIANCE: 0, RELAX: 0, OPEN_FETCH: 2, INSPECT: 0}
_HANDS_DELTA = {FETCH_PLACE: 0, USE_APPLIANCE: 0, RELAX: 0, OPEN_FETCH: 1, INSPECT: 0}


@dataclass
class GrammarConfig:
    episode_weights: dict[str, float]
    min_episodes: int
    max_episodes: int
    object_pool: dict[str, list]
    template_bank: dict[str, list[str]]
    seed: int = 0

    def __post_init__(self):
        if not (1 <= self.min_episodes <= self.max_episodes):
            raise ConfigError("need 1 <= min_episodes <= max_episodes")
        for kind, w in self.episode_weights.items():
            if kind not in EPISODE_KINDS:
                raise ConfigError(f"unknown episode kind {kind!r}")
            if w <= 0:
                raise ConfigError(f"weight for {kind} must be positive")
        for role in ("grabbable", "surface", "appliance", "sittable", "container_items", "inspectable"):
            if role not in self.object_pool or not self.object_pool[role]:
                raise ConfigError(f"object_pool.{role} missing or empty")


def load_grammar(doc: dict) -> GrammarConfig:
    return GrammarConfig(
        episode_weights={k: float(v) for k, v in doc["episode_weights"].items()},
        min_episodes=int(doc["min_episodes"]),
        max_episodes=int(doc["max_episodes"]),
        object_pool=doc["object_pool"],
        template_bank=doc["template_bank"],
        seed=int(doc.get("seed", 0)),
    )


def load_grammar_file(path) -> GrammarConfig:
    with open(path, encoding="utf-8") as f:
        return load_grammar(json.load(f))


@dataclass
class Episode:
    kind: str
    slots: dict[str, ObjectMention]
    variant: str  # template-bank key


def episode_steps(ep: Episode) -> list[Step]:
    s = ep.slots
    if ep.kind == FETCH_PLACE:
        o, d = s["obj"], s["dest"]
        return [
            Step(Action.WALK, (o,)),
            Step(Action.GRAB, (o,)),
            Step(Action.WALK, (d,)),
            Step(Action.PUT, (o, d)),
        ]
    if ep.kind == USE_APPLIANCE:
        a = s["appliance"]
        out = [Step(Action.WALK, (a,)), Step(Action.SWITCH_ON, (a,))]
        if ep.variant == "USE_APPLIANCE_OFF":
            out.append(Step(Action.SWITCH_OFF, (a,)))
        return out
    if ep.kind == RELAX:
        seat = s["seat"]
        return [
            Step(Action.WALK, (seat,)),
            Step(Action.SIT, (seat,)),
            Step(Action.STAND_UP, ()),
        ]
    if ep.kind == OPEN_FETCH:
        c, x = s["container"], s["item"]
        return [
            Step(Action.WALK, (c,)),
            Step(Action.OPEN, (c,)),
            Step(Action.GRAB, (x,)),
            Step(Action.CLOSE, (c,)),
        ]
    if ep.kind == INSPECT:
        t = s["target"]
        act = Action.LOOK_AT if ep.variant == "INSPECT_LOOK" else Action.TOUCH
        return [Step(Action.WALK, (t,)), Step(act, (t,))]
    raise TemplateMissingError(ep.kind)


class _IdAllocator:
    def __init__(self):
        self.counters: dict[str, int] = {}

    def fresh(self, class_name: str) -> ObjectMention:
        self.counters[class_name] = self.counters.get(class_name, 0) + 1
        return ObjectMention(class_name, self.counters[class_name])


def _sample_episode(cfg: GrammarConfig, rng: random.Random, hands_held: int) -> Episode:
    free = 2 - hands_held
    kinds = [k for k in cfg.episode_weights if _HANDS_NEEDED[k] <= free]
    if not kinds:
        raise ConfigError("no episode kind is feasible with the agent's hands occupied")
    weights = [cfg.episode_weights[k] for k in kinds]
    return Episode(rng.choices(kinds, weights=weights, k=1)[0], {}, "")


def _fill_episode(ep: Episode, cfg: GrammarConfig, rng: random.Random, ids: _IdAllocator):
    pool = cfg.object_pool
    if ep.kind == FETCH_PLACE:
        ep.slots = {
            "obj": ids.fresh(rng.choice(pool["grabbable"])),
            "dest": ids.fresh(rng.choice(pool["surface"])),
        }
        ep.variant = FETCH_PLACE
    elif ep.kind == USE_APPLIANCE:
        ep.slots = {"appliance": ids.fresh(rng.choice(pool["appliance"]))}
        ep.variant = "USE_APPLIANCE_OFF" if rng.random() < 0.5 else USE_APPLIANCE
    elif ep.kind == RELAX:
        ep.slots = {"seat": ids.fresh(rng.choice(pool["sittable"]))}
        ep.variant = RELAX
    elif ep.kind == OPEN_FETCH:
        container_cls, item_cls = rng.choice(pool["container_items"])
        ep.slots = {"container": ids.fresh(container_cls), "item": ids.fresh(item_cls)}
        ep.variant = OPEN_FETCH
    elif ep.kind == INSPECT:
        ep.slots = {"target": ids.fresh(rng.choice(pool["inspectable"]))}
        ep.variant = "INSPECT_LOOK" if rng.random() < 0.5 else "INSPECT_TOUCH"


def sample_episodes(cfg: GrammarConfig, rng: random.Random) -> list[Episode]:
    n = rng.randint(cfg.min_episodes, cfg.max_episodes)
    episodes = []
    ids = _IdAllocator()
    hands_held = 0
    for _ in range(n):
        ep = _sample_episode(cfg, rng, hands_held)
        _fill_episode(ep, cfg, rng, ids)
        hands_held += _HANDS_DELTA[ep.kind]
        episodes.append(ep)
    return episodes


def program_from_episodes(episodes: list[Episode]) -> Program:
    steps: list[Step] = []
    for ep in episodes:
        steps.extend(episode_steps(ep))
    return Program(tuple(steps))


def generate_program(cfg: GrammarConfig, rng: random.Random) -> Program:
    return program_from_episodes(sample_episodes(cfg, rng))


def segment_program(p: Program) -> list[Episode]:
    """Recover the episode structure of a grammar-generated program."""
    steps = p.steps
    episodes: list[Episode] = []
    i = 0
    while i < len(steps):
        if steps[i].action is not Action.WALK or i + 1 >= len(steps):
            raise ValueError(f"step {i}: not a grammar-shaped program")
        walk_target = steps[i].objects[0]
        nxt = steps[i + 1].action
        if nxt is Action.GRAB:
            if (
                i + 3 >= len(steps)
                or steps[i + 2].action is not Action.WALK
                or steps[i + 3].action is not Action.PUT
            ):
                raise ValueError(f"step {i}: malformed fetch-and-place")
            episodes.append(
                Episode(
                    FETCH_PLACE,
                    {"obj": walk_target, "dest": steps[i + 2].objects[0]},
                    FETCH_PLACE,
                )
            )
            i += 4
        elif nxt is Action.SWITCH_ON:
            if (
                i + 2 < len(steps)
                and steps[i + 2].action is Action.SWITCH_OFF
                and steps[i + 2].objects == steps[i + 1].objects
            ):
                episodes.append(
                    Episode(USE_APPLIANCE, {"appliance": walk_target}, "USE_APPLIANCE_OFF")
                )
                i += 3
            else:
                episodes.append(
                    Episode(USE_APPLIANCE, {"appliance": walk_target}, USE_APPLIANCE)
                )
                i += 2
        elif nxt is Action.SIT:
            if i + 2 >= len(steps) or steps[i + 2].action is not Action.STAND_UP:
                raise ValueError(f"step {i}: malformed relax episode")
            episodes.append(Episode(RELAX, {"seat": walk_target}, RELAX))
            i += 3
        elif nxt is Action.OPEN:
            if (
                i + 3 >= len(steps)
                or steps[i + 2].action is not Action.GRAB
                or steps[i + 3].action is not Action.CLOSE
            ):
                raise ValueError(f"step {i}: malformed container fetch")
            episodes.append(
                Episode(
                    OPEN_FETCH,
                    {"container": walk_target, "item": steps[i + 2].objects[0]},
                    OPEN_FETCH,
                )
            )
            i += 4
        elif nxt is Action.LOOK_AT:
            episodes.append(Episode(INSPECT, {"target": walk_target}, "INSPECT_LOOK"))
            i += 2
        elif nxt is Action.TOUCH:
            episodes.append(Episode(INSPECT, {"target": walk_target}, "INSPECT_TOUCH"))
            i += 2
        else:
            raise ValueError(f"step {i + 1}: unexpected action in grammar program")
    return episodes


def _surface(mention: ObjectMention) -> str:
    return mention.class_name.lower().replace("_", " ")


def describe_episodes(
    episodes: list[Episode], cfg: GrammarConfig, rng: random.Random
) -> str:
    sentences = []
    for ep in episodes:
        bank = cfg.template_bank.get(ep.variant)
        if not bank:
            raise TemplateMissingError(ep.variant)
        template = rng.choice(bank)
        sentences.append(
            template.format(**{role: _surface(m) for role, m in ep.slots.items()})
        )
    return " ".join(sentences)


def describe(p: Program, cfg: GrammarConfig, rng: random.Random) -> str:
    """Templated natural-language description of a grammar-generated program."""
    if not p.steps:
        return ""
    return describe_episodes(segment_program(p), cfg, rng)


def generate_dataset(cfg: GrammarConfig, n: int) -> list[tuple[str, str, Program]]:
    """Deterministic list of (record id, description, program) triples.

    Item k's randomness derives only from (seed, k), so any index range can
    be produced independently.
    """
    out = []
    for k in range(n):
        rng = random.Random(f"{cfg.seed}:{k}")
        episodes = sample_episodes(cfg, rng)
        program = program_from_episodes(episodes)
        description = describe_episodes(episodes, cfg, rng)
        out.append((f"synth-{cfg.seed}-{k}", description, program))
    return out
