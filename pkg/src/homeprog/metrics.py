"""Program-similarity and accuracy metrics.

The core primitive is the longest common subsequence between two step
sequences; the normalized variant divides by the longer program's length,
mimicking IoU for programs. The combined RL reward adds a weighted binary
executability term.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .environment import Environment
from .errors import DegenerateInputError
from .executor import SearchLimits, is_executable
from .programs import Program, Step, canonicalize_ids

STEP = "STEP"
ACTION = "ACTION"
OBJECT = "OBJECT"

_MODES = (STEP, ACTION, OBJECT)


def step_key(s: Step, mode: str = STEP):
    """Hashable equality key for a step under the given comparison mode."""
    act = s.action.symbol if s.action is not None else f"?{s.raw_action}"
    if mode == ACTION:
        return act
    if mode == OBJECT:
        return tuple(sorted(o.class_name for o in s.objects))
    if mode == STEP:
        return (act, tuple((o.class_name, o.instance_id) for o in s.objects))
    raise ValueError(f"unknown equality mode {mode!r}")


def lcs_from_keys(a: Sequence, b: Sequence) -> int:
    """Standard O(|a||b|) dynamic program over precomputed equality keys."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        best = 0
        for j, y in enumerate(b):
            best = prev[j] + 1 if x == y else max(prev[j + 1], cur[j])
            cur.append(best)
        prev = cur
    return prev[-1]


def _keys(steps: Sequence[Step], mode: str) -> list:
    if mode == STEP:
        steps = canonicalize_ids(Program(tuple(steps))).steps
    return [step_key(s, mode) for s in steps]


def lcs_length(a: Sequence[Step], b: Sequence[Step], mode: str = STEP) -> int:
    if mode not in _MODES:
        raise ValueError(f"unknown equality mode {mode!r}")
    return lcs_from_keys(_keys(a, mode), _keys(b, mode))


def normalized_lcs(pred: Program, gt: Program, mode: str = STEP) -> float:
    """LCS length over max(|pred|, |gt|); two empty programs score 1.0."""
    m = max(len(pred.steps), len(gt.steps))
    if m == 0:
        return 1.0
    return lcs_length(pred.steps, gt.steps, mode) / m


@dataclass(frozen=True)
class RewardConfig:
    lambda_sim: float = 0.1

    def __post_init__(self):
        if self.lambda_sim < 0:
            raise ValueError("lambda_sim must be non-negative")


@dataclass
class ScoreReport:
    lcs_len: int
    norm_lcs: float
    action_acc: float
    object_acc: float
    step_acc: float
    executable: bool | None = None
    reward: float | None = None
    violation: str | None = None

    def to_doc(self) -> dict:
        d = {
            "lcs_len": self.lcs_len,
            "norm_lcs": self.norm_lcs,
            "action_acc": self.action_acc,
            "object_acc": self.object_acc,
            "step_acc": self.step_acc,
        }
        if self.executable is not None:
            d["executable"] = self.executable
            d["reward"] = self.reward
            if self.violation is not None:
                d["violation"] = self.violation
        return d


def score(
    pred: Program,
    gt: Program,
    env: Environment | None = None,
    cfg: RewardConfig = RewardConfig(),
    limits: SearchLimits | None = None,
) -> ScoreReport:
    """Full report for one (prediction, ground truth) pair. Executability and
    the combined reward are filled only when an environment is supplied; the
    environment is expected to be scene-prepared already."""
    report = ScoreReport(
        lcs_len=lcs_length(pred.steps, gt.steps, STEP),
        norm_lcs=normalized_lcs(pred, gt, STEP),
        action_acc=normalized_lcs(pred, gt, ACTION),
        object_acc=normalized_lcs(pred, gt, OBJECT),
        step_acc=normalized_lcs(pred, gt, STEP),
    )
    if env is not None:
        ok, violation = is_executable(pred, env, limits)
        report.executable = ok
        report.violation = violation.code if violation is not None else None
        report.reward = report.norm_lcs + cfg.lambda_sim * (1.0 if ok else 0.0)
    return report


def pairwise_similarity(progs: Sequence[Program]) -> list[list[float]]:
    """Symmetric normalized-LCS matrix in STEP mode, diagonal 1.0."""
    if not progs:
        raise DegenerateInputError("need at least one program")
    keys = [_keys(p.steps, STEP) for p in progs]
    n = len(progs)
    mat = [[1.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            m = max(len(keys[i]), len(keys[j]))
            v = 1.0 if m == 0 else lcs_from_keys(keys[i], keys[j]) / m
            mat[i][j] = mat[j][i] = v
    return mat


def diversity_stats(progs: Sequence[Program]) -> tuple[float, float]:
    """Mean LCS length and mean normalized LCS over all unordered pairs."""
    if len(progs) < 2:
        raise DegenerateInputError("need at least two programs")
    keys = [_keys(p.steps, STEP) for p in progs]
    total_lcs = 0.0
    total_norm = 0.0
    n_pairs = 0
    for i in range(len(progs)):
        for j in range(i + 1, len(progs)):
            l = lcs_from_keys(keys[i], keys[j])
            m = max(len(keys[i]), len(keys[j]))
            total_lcs += l
            total_norm += 1.0 if m == 0 else l / m
            n_pairs += 1
    return total_lcs / n_pairs, total_norm / n_pairs


def executability_rate(
    progs: Sequence[Program],
    env_factory: Callable[[Program], Environment],
    limits: SearchLimits | None = None,
) -> float:
    """Fraction of programs executable in the environment the factory yields
    for each of them (typically after scene preparation)."""
    if not progs:
        return 1.0
    ok = sum(1 for p in progs if is_executable(p, env_factory(p), limits)[0])
    return ok / len(progs)
