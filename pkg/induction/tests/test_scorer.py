import pytest

from induction.scorer import ScorerClient, ServiceUnavailable, reward_from_response

WATCH_TV = [
    "[Walk] <TELEVISION> (1)",
    "[SwitchOn] <TELEVISION> (1)",
    "[Walk] <SOFA> (1)",
    "[Sit] <SOFA> (1)",
]


@pytest.fixture(scope="module")
def client():
    with ScorerClient() as c:
        yield c


def test_score_round_trip(client):
    resp = client.score(WATCH_TV, reference=WATCH_TV, env="demo_home")
    assert resp["norm_lcs"] == 1.0
    assert resp["executable"] is True
    assert resp["reward"] == pytest.approx(1.1)


def test_batch_alignment(client):
    reqs = [
        {"candidate": WATCH_TV, "reference": WATCH_TV, "env": "demo_home"},
        {"candidate": [], "reference": WATCH_TV, "env": "demo_home"},
        {"candidate": WATCH_TV, "env": "demo_home"},
    ]
    resps = client.score_batch(reqs)
    assert len(resps) == 3
    assert resps[0]["norm_lcs"] == 1.0
    assert resps[1]["norm_lcs"] == 0.0
    assert "norm_lcs" not in resps[2]


def test_reward_recomputation(client):
    resp = client.score(WATCH_TV, reference=WATCH_TV, env="demo_home")
    assert reward_from_response(resp, 0.1) == pytest.approx(resp["reward"])
    assert reward_from_response(resp, 0.0) == pytest.approx(resp["norm_lcs"])


def test_parse_error_candidate(client):
    resp = client.score(["nonsense"], reference=WATCH_TV, env="demo_home")
    assert resp["violation"] == "PARSE_ERROR"
    assert resp["executable"] is False


def test_bad_spec_raises():
    with pytest.raises(ServiceUnavailable):
        ScorerClient("stdio:/nonexistent/binary")
    with pytest.raises(ServiceUnavailable):
        ScorerClient("bogus:spec")


def test_service_matches_local_recompute(client, small_test):
    # cross-component consistency: service reward equals the locally
    # recomputed formula on generated ground-truth pairs
    for r in small_test[:5]:
        resp = client.score(r.program, reference=r.program, env="demo_home", prep=True)
        assert resp["executable"] is True
        assert resp["reward"] == pytest.approx(resp["norm_lcs"] + 0.1)
