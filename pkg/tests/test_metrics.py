import math
import random

import pytest
from hypothesis import given, strategies as st

from homeprog import metrics as hm
from homeprog import programs as hp
from homeprog.errors import DegenerateInputError

from test_programs import programs


def P(text):
    return hp.parse_program(text)


def oracle_lcs(a, b):
    """Recursive-with-memo reference implementation."""
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def rec(i, j):
        if i == len(a) or j == len(b):
            return 0
        if a[i] == b[j]:
            return 1 + rec(i + 1, j + 1)
        return max(rec(i + 1, j), rec(i, j + 1))

    return rec(0, 0)


def test_lcs_basic():
    a = P("[Walk] <TV> (1)\n[SwitchOn] <TV> (1)\n[Sit] <SOFA> (1)")
    b = P("[Walk] <TV> (1)\n[Sit] <SOFA> (1)")
    assert hm.lcs_length(a.steps, b.steps) == 2
    assert hm.normalized_lcs(a, b) == pytest.approx(2 / 3)


def test_lcs_empty_cases():
    a = P("[Walk] <TV> (1)")
    assert hm.lcs_length((), a.steps) == 0
    assert hm.normalized_lcs(hp.Program(), a) == 0.0
    assert hm.normalized_lcs(hp.Program(), hp.Program()) == 1.0


def test_step_mode_canonicalizes_ids():
    a = P("[Walk] <TV> (7)\n[SwitchOn] <TV> (7)")
    b = P("[Walk] <TV> (1)\n[SwitchOn] <TV> (1)")
    assert hm.normalized_lcs(a, b) == 1.0


def test_action_and_object_modes():
    a = P("[Walk] <TV> (1)\n[SwitchOn] <TV> (1)")
    b = P("[Walk] <LAMP> (1)\n[SwitchOn] <LAMP> (1)")
    assert hm.normalized_lcs(a, b, hm.ACTION) == 1.0
    assert hm.normalized_lcs(a, b, hm.OBJECT) == 0.0
    assert hm.normalized_lcs(a, b, hm.STEP) == 0.0


def test_object_mode_ignores_action_and_order():
    a = P("[Put] <MILK> (1) <TABLE> (1)")
    b = P("[Put] <TABLE> (1) <MILK> (1)")
    assert hm.normalized_lcs(a, b, hm.OBJECT) == 1.0


def test_unknown_mode_rejected():
    a = P("[Walk] <TV> (1)")
    with pytest.raises(ValueError):
        hm.lcs_length(a.steps, a.steps, "BOGUS")


def test_archive_steps_compare_by_raw_action():
    a = hp.parse_program("[Pour] <MILK> (1)", archive=True)
    b = hp.parse_program("[Pour] <MILK> (1)", archive=True)
    c = hp.parse_program("[Spill] <MILK> (1)", archive=True)
    assert hm.normalized_lcs(a, b) == 1.0
    assert hm.normalized_lcs(a, c) == 0.0


@given(programs(), programs())
def test_lcs_matches_oracle(a, b):
    ka = tuple(hm.step_key(s) for s in hp.canonicalize_ids(a).steps)
    kb = tuple(hm.step_key(s) for s in hp.canonicalize_ids(b).steps)
    assert hm.lcs_length(a.steps, b.steps) == oracle_lcs(ka, kb)


@given(programs(), programs())
def test_lcs_symmetry_and_bounds(a, b):
    l = hm.lcs_length(a.steps, b.steps)
    assert l == hm.lcs_length(b.steps, a.steps)
    assert 0 <= l <= min(len(a.steps), len(b.steps))
    v = hm.normalized_lcs(a, b)
    assert 0.0 <= v <= 1.0


@given(programs())
def test_self_similarity_is_one(p):
    assert hm.normalized_lcs(p, p) == 1.0


def test_score_without_env():
    r = hm.score(P("[Walk] <TV> (1)"), P("[Walk] <TV> (1)"))
    assert r.lcs_len == 1 and r.norm_lcs == 1.0
    assert r.executable is None and r.reward is None
    assert "executable" not in r.to_doc()


def test_score_with_env(demo_home, watch_tv_text):
    gt = P(watch_tv_text)
    r = hm.score(gt, gt, demo_home)
    assert r.executable is True
    assert r.reward == pytest.approx(1.0 + 0.1)
    bad = P("[Walk] <TELEVISION> (1)\n[Grab] <TELEVISION> (1)")
    r2 = hm.score(bad, gt, demo_home)
    assert r2.executable is False
    assert r2.violation == "MISSING_PROPERTY"
    assert r2.reward == pytest.approx(r2.norm_lcs)


def test_reward_lambda(demo_home, watch_tv_text):
    gt = P(watch_tv_text)
    r = hm.score(gt, gt, demo_home, hm.RewardConfig(lambda_sim=0.5))
    assert r.reward == pytest.approx(1.5)
    with pytest.raises(ValueError):
        hm.RewardConfig(lambda_sim=-0.1)


def test_pairwise_similarity_matrix():
    progs = [P("[Walk] <TV> (1)"), P("[Walk] <TV> (1)\n[SwitchOn] <TV> (1)"),
             P("[Sit] <SOFA> (1)")]
    mat = hm.pairwise_similarity(progs)
    assert all(mat[i][i] == 1.0 for i in range(3))
    assert mat[0][1] == pytest.approx(0.5)
    assert mat[0][2] == 0.0
    assert mat == [list(row) for row in zip(*mat)]  # symmetric


def test_diversity_stats():
    progs = [P("[Walk] <TV> (1)"), P("[Walk] <TV> (1)"), P("[Sit] <SOFA> (1)")]
    mean_lcs, mean_norm = hm.diversity_stats(progs)
    assert mean_lcs == pytest.approx(1 / 3)
    assert mean_norm == pytest.approx(1 / 3)
    with pytest.raises(DegenerateInputError):
        hm.diversity_stats([progs[0]])


def test_executability_rate(demo_home):
    progs = [P("[Walk] <TELEVISION> (1)"), P("[Grab] <TELEVISION> (1)")]
    rate = hm.executability_rate(progs, lambda p: demo_home)
    assert rate == 0.5
    assert hm.executability_rate([], lambda p: demo_home) == 1.0
