import pytest

from homeprog.cli import data_path, resolve_env
from homeprog.generator import load_grammar_file
from homeprog.scene_prep import load_kb_file

HOME_NAMES = ("demo_home", "loft_home", "cottage_home")


@pytest.fixture(scope="session")
def kb():
    return load_kb_file(data_path("kb", "placement.kb.json"))


@pytest.fixture(scope="session")
def grammar_cfg():
    return load_grammar_file(data_path("grammar", "default_grammar.json"))


@pytest.fixture()
def demo_home():
    return resolve_env("demo_home")


@pytest.fixture()
def all_homes():
    return [resolve_env(n) for n in HOME_NAMES]


@pytest.fixture(scope="session")
def watch_tv_text():
    with open(data_path("programs", "watch_tv.prog"), encoding="utf-8") as f:
        return f.read()
