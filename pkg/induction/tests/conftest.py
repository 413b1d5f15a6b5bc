import json
import subprocess
from pathlib import Path

import pytest

from induction.data import build_vocabulary, by_split, load_manifest


def make_corpus(out_dir: Path, n: int, seed: int, ratios: str = "0.8,0.1,0.1") -> Path:
    """Generate and split a corpus via the scoring toolkit's CLI."""
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = out_dir / "manifest.jsonl"
    subprocess.run(["homeprog", "gen", "--n", str(n), "--seed", str(seed),
                    "--out", str(out_dir)], check=True, capture_output=True)
    subprocess.run(["homeprog", "split", str(manifest), "--ratios", ratios,
                    "--seed", str(seed), "--out", str(manifest)],
                   check=True, capture_output=True)
    return manifest


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    manifest = make_corpus(tmp_path_factory.mktemp("corpus"), n=120, seed=7)
    return load_manifest(manifest)


@pytest.fixture(scope="session")
def small_train(small_corpus):
    return by_split(small_corpus, "TRAIN")


@pytest.fixture(scope="session")
def small_test(small_corpus):
    return by_split(small_corpus, "TEST")


@pytest.fixture(scope="session")
def vocab(small_train):
    return build_vocabulary(small_train)
