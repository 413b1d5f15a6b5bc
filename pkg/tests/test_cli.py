import json

import pytest

from homeprog import cli
from homeprog import dataset as hd
from homeprog import metrics as hm
from homeprog import programs as hp


def run(capsys, *argv):
    code = cli.main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


@pytest.fixture
def prog_file(tmp_path, watch_tv_text):
    f = tmp_path / "watch_tv.prog"
    f.write_text(watch_tv_text)
    return str(f)


def test_validate_ok(capsys, prog_file):
    code, out, _ = run(capsys, "validate", prog_file)
    assert code == 0
    assert out.strip() == "OK: 5 step(s)"


def test_validate_parse_error(capsys, tmp_path):
    f = tmp_path / "bad.prog"
    f.write_text("[Fly] <CAT> (1)")
    code, _, err = run(capsys, "validate", str(f))
    assert code == 1
    assert "error" in err


def test_validate_warning_still_ok(capsys, tmp_path):
    f = tmp_path / "dup.prog"
    f.write_text("[Walk] <TV> (1)\n[Walk] <TV> (1)")
    code, out, _ = run(capsys, "validate", str(f))
    assert code == 0
    assert "DUPLICATE_STEP" in out and "OK: 2 step(s)" in out


def test_exec_executable(capsys, prog_file, tmp_path):
    trace_path = tmp_path / "trace.jsonl"
    code, out, _ = run(capsys, "exec", "--env", "demo_home", "--program", prog_file,
                       "--trace", str(trace_path))
    assert code == 0
    assert out.strip() == "EXECUTABLE"
    lines = [json.loads(l) for l in trace_path.read_text().splitlines()]
    assert len(lines) == 6  # 5 steps + final verdict line
    assert all(e["outcome"] == "OK" for e in lines[:-1])
    assert lines[-1]["verdict"] == "EXECUTABLE"
    assert len(lines[-1]["final_env_hash"]) == 64


def test_exec_not_executable(capsys, tmp_path):
    f = tmp_path / "bad.prog"
    f.write_text("[Grab] <TELEVISION> (1)")
    code, out, _ = run(capsys, "exec", "--env", "demo_home", "--program", str(f))
    assert code == 1
    assert out.strip() == "NOT_EXECUTABLE step=0 violation=NOT_NEAR"


def test_exec_with_prep(capsys, tmp_path):
    f = tmp_path / "milk.prog"
    f.write_text("[Walk] <FRIDGE> (1)\n[Open] <FRIDGE> (1)\n[Grab] <MILK> (1)")
    code, out, _ = run(capsys, "exec", "--env", "demo_home", "--program", str(f))
    assert code == 1  # no MILK in the raw home
    code, out, _ = run(capsys, "exec", "--env", "demo_home", "--program", str(f), "--prep")
    assert code == 0


def test_exec_env_dir_flag_and_unknown_env(capsys, prog_file, tmp_path):
    code, _, err = run(capsys, "exec", "--env", "no_such_home", "--program", prog_file)
    assert code == 2
    assert "not found" in err


def test_score_single_pair(capsys, prog_file):
    code, out, _ = run(capsys, "score", "--pred", prog_file, "--gt", prog_file,
                       "--env", "demo_home")
    assert code == 0
    doc = json.loads(out)
    assert doc["norm_lcs"] == 1.0
    assert doc["executable"] is True
    assert doc["reward"] == pytest.approx(1.1)
    assert "id" not in doc


def test_score_without_env_omits_reward(capsys, prog_file):
    code, out, _ = run(capsys, "score", "--pred", prog_file, "--gt", prog_file)
    assert code == 0
    doc = json.loads(out)
    assert "reward" not in doc and "executable" not in doc


def test_score_batch_manifests(capsys, tmp_path, grammar_cfg):
    from homeprog import generator as hg

    data = hg.generate_dataset(grammar_cfg, 5)
    gt = [hd.DatasetRecord(i, d, p) for i, d, p in data]
    # predictions: exact on even ids, empty program on odd
    pred = [hd.DatasetRecord(r.id, r.description,
                             r.program if k % 2 == 0 else hp.Program())
            for k, r in enumerate(gt)]
    gt_path, pred_path = tmp_path / "gt.jsonl", tmp_path / "pred.jsonl"
    hd.save_manifest(gt, gt_path)
    hd.save_manifest(pred, pred_path)
    code, out, _ = run(capsys, "score", "--pred", str(pred_path), "--gt", str(gt_path),
                       "--env", "demo_home", "--prep")
    assert code == 0
    docs = [json.loads(l) for l in out.splitlines()]
    assert [d["id"] for d in docs] == [r.id for r in gt]
    for k, d in enumerate(docs):
        assert d["norm_lcs"] == (1.0 if k % 2 == 0 else 0.0)
        assert d["executable"] is True  # empty programs execute trivially


def test_score_batch_missing_id(capsys, tmp_path):
    r = hd.DatasetRecord("a", "d", hp.parse_program("[StandUp]"))
    gt_path, pred_path = tmp_path / "gt.jsonl", tmp_path / "pred.jsonl"
    hd.save_manifest([r], gt_path)
    hd.save_manifest([], pred_path)
    code, _, err = run(capsys, "score", "--pred", str(pred_path), "--gt", str(gt_path))
    assert code == 2
    assert "missing prediction" in err


def test_gen_stats_split_pipeline(capsys, tmp_path):
    out_dir = tmp_path / "corpus"
    code, out, _ = run(capsys, "gen", "--n", "30", "--seed", "9", "--out", str(out_dir))
    assert code == 0
    manifest = out_dir / "manifest.jsonl"
    assert manifest.is_file()
    records = hd.load_manifest(manifest)
    assert len(records) == 30
    assert records[0].id == "synth-9-0"

    code, out, _ = run(capsys, "stats", str(manifest), "--hist-dir", str(tmp_path / "h"))
    assert code == 0
    stats = json.loads(out)
    assert stats["n_programs"] == 30
    hist = (tmp_path / "h" / "action_hist.csv").read_text().splitlines()
    assert hist[0] == "token,count"
    counts = [int(l.split(",")[1]) for l in hist[1:]]
    assert counts == sorted(counts, reverse=True)

    split_path = tmp_path / "split.jsonl"
    code, _, _ = run(capsys, "split", str(manifest), "--ratios", "0.8,0.1,0.1",
                     "--seed", "1", "--out", str(split_path))
    assert code == 0
    splits = [r.split for r in hd.load_manifest(split_path)]
    assert splits.count("TRAIN") == 24
    assert splits.count("VAL") == 3
    assert splits.count("TEST") == 3


def test_split_bad_ratios(capsys, tmp_path):
    manifest = tmp_path / "m.jsonl"
    hd.save_manifest([hd.DatasetRecord("a", "d", hp.Program())], manifest)
    code, _, err = run(capsys, "split", str(manifest), "--ratios", "0.5,0.1,0.1")
    assert code == 2


def test_gen_determinism(capsys, tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    run(capsys, "gen", "--n", "15", "--seed", "3", "--out", str(d1))
    run(capsys, "gen", "--n", "15", "--seed", "3", "--out", str(d2))
    assert (d1 / "manifest.jsonl").read_bytes() == (d2 / "manifest.jsonl").read_bytes()


def test_missing_file_exit_2(capsys):
    code, _, err = run(capsys, "validate", "/nonexistent/x.prog")
    assert code == 2


def test_bad_usage_exit_2(capsys):
    assert cli.main(["frobnicate"]) == 2


def test_env_dir_override(tmp_path, monkeypatch, capsys, prog_file):
    monkeypatch.setenv(cli.ENV_DIR_VAR, str(tmp_path))
    code, _, err = run(capsys, "exec", "--env", "demo_home", "--program", prog_file)
    assert code == 2  # demo_home no longer resolvable in the empty override dir
