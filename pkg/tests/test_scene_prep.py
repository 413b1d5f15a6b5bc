import json
import random

import pytest

from homeprog import environment as he
from homeprog import programs as hp
from homeprog import scene_prep as sp
from homeprog.errors import NoSupportAvailableError, SchemaError, UnknownClassError


def test_load_kb_rejects_bad_weight():
    with pytest.raises(SchemaError):
        sp.load_kb({"MILK": {"supports": [{"class": "FRIDGE", "kind": "INSIDE", "weight": 0}]}})


def test_load_kb_requires_supports():
    with pytest.raises(SchemaError):
        sp.load_kb({"MILK": {"supports": []}})


def test_insert_missing_item(demo_home, kb):
    p = hp.parse_program("[Walk] <FRIDGE> (1)\n[Open] <FRIDGE> (1)\n[Grab] <MILK> (1)")
    prepped = sp.prepare_scene(demo_home, p, kb, seed=1)
    milks = [i for i in prepped.instances.values() if i.class_name == "MILK"]
    assert len(milks) == 1
    assert milks[0].relation == ("INSIDE", 11)
    assert milks[0].uid == max(demo_home.instances) + 1
    # container stays closed: the program must open it
    assert "CLOSED" in prepped.instances[11].states


def test_noop_when_objects_exist(demo_home, kb):
    p = hp.parse_program("[Walk] <TELEVISION> (1)")
    prepped = sp.prepare_scene(demo_home, p, kb, seed=1)
    assert he.diff(demo_home, prepped).is_empty()


def test_count_rule_inserts_only_missing(demo_home, kb):
    # home has one CUP; program mentions ids 1 and 2
    p = hp.parse_program("[Walk] <CUP> (1)\n[Walk] <CUP> (2)")
    prepped = sp.prepare_scene(demo_home, p, kb, seed=0)
    cups = [i for i in prepped.instances.values() if i.class_name == "CUP"]
    assert len(cups) == 2


def test_unknown_class(demo_home, kb):
    p = hp.parse_program("[Walk] <UNICORN> (1)")
    with pytest.raises(UnknownClassError):
        sp.prepare_scene(demo_home, p, kb, seed=0)


def test_no_support_available(demo_home):
    kb = sp.load_kb({"MILK": {"supports": [{"class": "SPACESHIP", "kind": "INSIDE", "weight": 1}],
                              "properties": ["GRABBABLE"]}})
    p = hp.parse_program("[Grab] <MILK> (1)")
    with pytest.raises(NoSupportAvailableError):
        sp.prepare_scene(demo_home, p, kb, seed=0)


def test_sample_support_single_option(demo_home, kb):
    rng = random.Random(0)
    uid, kind = sp.sample_support(kb, "MILK", demo_home, rng)
    assert (uid, kind) == (11, "INSIDE")


def test_sample_support_skips_absent_classes(demo_home):
    kb = sp.load_kb({"TOY": {"supports": [
        {"class": "SPACESHIP", "kind": "ON_TOP", "weight": 100.0},
        {"class": "TABLE", "kind": "ON_TOP", "weight": 1.0},
    ], "properties": ["GRABBABLE"]}})
    uid, kind = sp.sample_support(kb, "TOY", demo_home, random.Random(0))
    assert demo_home.instances[uid].class_name == "TABLE"


def test_sample_support_weighted_choice(demo_home):
    # weights 1 : 1e-6 -> the heavy option in at least 999 of 1000 draws
    kb = sp.load_kb({"TOY": {"supports": [
        {"class": "TABLE", "kind": "ON_TOP", "weight": 1.0},
        {"class": "DESK", "kind": "ON_TOP", "weight": 1e-6},
    ], "properties": ["GRABBABLE"]}})
    heavy = 0
    for seed in range(1000):
        uid, _ = sp.sample_support(kb, "TOY", demo_home, random.Random(seed))
        if demo_home.instances[uid].class_name == "TABLE":
            heavy += 1
    assert heavy >= 999


def test_monotone_never_mutates_existing(demo_home, kb):
    p = hp.parse_program("[Grab] <MILK> (1)\n[Grab] <GLASS> (1)\n[Grab] <GLASS> (2)")
    prepped = sp.prepare_scene(demo_home, p, kb, seed=3)
    for uid, inst in demo_home.instances.items():
        assert he.to_doc(demo_home)["instances"] == [
            d for d in he.to_doc(prepped)["instances"] if d["uid"] in demo_home.instances
        ]
        break
    d = he.diff(demo_home, prepped)
    assert not d.instances and not d.agent
    assert len(d.added) == 3


def test_prepared_env_still_valid(demo_home, kb):
    p = hp.parse_program("[Grab] <MILK> (1)\n[Walk] <SHELF> (1)\n[Walk] <PAINTING> (1)")
    prepped = sp.prepare_scene(demo_home, p, kb, seed=5)
    he.load_environment(he.to_doc(prepped))  # re-validates all invariants


def test_determinism(demo_home, kb):
    p = hp.parse_program("[Grab] <MILK> (1)\n[Walk] <TOY> (1)\n[Walk] <PLANT> (1)")
    a = sp.prepare_scene(demo_home, p, kb, seed=7)
    b = sp.prepare_scene(demo_home, p, kb, seed=7)
    assert json.dumps(he.to_doc(a), sort_keys=True) == json.dumps(he.to_doc(b), sort_keys=True)
