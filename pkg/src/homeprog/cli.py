"""Command-line entry point and the newline-delimited JSON scoring service.

Exit codes: 0 success, 1 domain failure (e.g. a non-executable program),
2 usage or schema error.
"""
from __future__ import annotations

import argparse
import json
import os
import socketserver
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import dataset as ds
from . import generator as gen
from . import metrics
from . import programs as prog
from .environment import Environment, env_hash, load_environment_file
from .errors import BadRatiosError, ConfigError, HomeprogError, SchemaError
from .executor import SearchLimits, ground_and_execute, is_executable
from .scene_prep import PlacementKB, load_kb_file, prepare_scene

ENV_DIR_VAR = "HOMEPROG_ENVS"


def data_path(*parts) -> Path:
    return Path(resources.files("homeprog").joinpath("data", *parts))


def default_env_dir() -> Path:
    override = os.environ.get(ENV_DIR_VAR)
    if override:
        return Path(override)
    return data_path("environments")


def default_kb_path() -> Path:
    return data_path("kb", "placement.kb.json")


def resolve_env(name_or_path: str, env_dir: Path | None = None) -> Environment:
    p = Path(name_or_path)
    if p.is_file():
        return load_environment_file(p)
    d = env_dir or default_env_dir()
    candidate = d / f"{name_or_path}.env.json"
    if candidate.is_file():
        return load_environment_file(candidate)
    raise SchemaError(str(name_or_path), "environment not found")


def _load_program_file(path: str) -> prog.Program:
    with open(path, encoding="utf-8") as f:
        return prog.parse_program(f.read())


def _load_pairs(pred_path: str, gt_path: str):
    """Either two .prog files (one pair) or two aligned .jsonl manifests."""
    if pred_path.endswith(".jsonl") or gt_path.endswith(".jsonl"):
        pred_records = {r.id: r for r in ds.load_manifest(pred_path)}
        gt_records = ds.load_manifest(gt_path)
        pairs = []
        for r in gt_records:
            if r.id not in pred_records:
                raise SchemaError(pred_path, f"missing prediction for id {r.id!r}")
            pairs.append((r.id, pred_records[r.id].program, r.program))
        return pairs
    return [(None, _load_program_file(pred_path), _load_program_file(gt_path))]


def cmd_validate(args) -> int:
    try:
        p = _load_program_file(args.file)
    except HomeprogError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    issues = prog.validate(p)
    for issue in issues:
        print(f"{issue.severity}: step {issue.step_index}: {issue.code}: {issue.message}")
    if any(i.severity == "error" for i in issues):
        return 1
    print(f"OK: {len(p.steps)} step(s)")
    return 0


def cmd_exec(args) -> int:
    env = resolve_env(args.env, Path(args.envs) if args.envs else None)
    p = _load_program_file(args.program)
    if args.prep:
        kb = load_kb_file(args.kb or default_kb_path())
        env = prepare_scene(env, p, kb, args.seed)
    gmap, trace = ground_and_execute(p, env, SearchLimits())
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as f:
            for entry in trace.entries:
                f.write(json.dumps(entry.to_doc(), sort_keys=True) + "\n")
            f.write(
                json.dumps(
                    {"verdict": trace.verdict, "final_env_hash": env_hash(trace.final_env)},
                    sort_keys=True,
                )
                + "\n"
            )
    if gmap is not None:
        print("EXECUTABLE")
        return 0
    v = trace.violation
    print(f"NOT_EXECUTABLE step={trace.failed_step} violation={v.code if v else '?'}")
    return 1


def cmd_score(args) -> int:
    env = None
    kb = None
    if args.env:
        env = resolve_env(args.env, Path(args.envs) if args.envs else None)
        if args.prep:
            kb = load_kb_file(args.kb or default_kb_path())
    cfg = metrics.RewardConfig(lambda_sim=args.lambda_sim)
    for pair_id, pred, gt in _load_pairs(args.pred, args.gt):
        pair_env = env
        if env is not None and kb is not None:
            pair_env = prepare_scene(env, pred, kb, args.seed)
        report = metrics.score(pred, gt, pair_env, cfg)
        doc = report.to_doc()
        if pair_id is not None:
            doc["id"] = pair_id
        print(json.dumps(doc, sort_keys=True))
    return 0


def cmd_gen(args) -> int:
    cfg = gen.load_grammar_file(args.grammar or data_path("grammar", "default_grammar.json"))
    if args.seed is not None:
        cfg.seed = args.seed
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = [
        ds.DatasetRecord(id=rid, description=desc, program=p)
        for rid, desc, p in gen.generate_dataset(cfg, args.n)
    ]
    ds.save_manifest(records, out_dir / "manifest.jsonl")
    print(f"wrote {len(records)} record(s) to {out_dir / 'manifest.jsonl'}")
    return 0


def cmd_stats(args) -> int:
    records = ds.load_manifest(args.manifest)
    stats = ds.compute_stats(records)
    print(json.dumps(stats.to_doc(), sort_keys=True))
    if args.hist_dir:
        hist_dir = Path(args.hist_dir)
        hist_dir.mkdir(parents=True, exist_ok=True)
        for name, hist in (("action_hist", stats.action_hist), ("object_hist", stats.object_hist)):
            with open(hist_dir / f"{name}.csv", "w", encoding="utf-8") as f:
                f.write("token,count\n")
                for token, count in sorted(hist.items(), key=lambda kv: (-kv[1], kv[0])):
                    f.write(f"{token},{count}\n")
    return 0


def cmd_split(args) -> int:
    records = ds.load_manifest(args.manifest)
    ratios = tuple(float(x) for x in args.ratios.split(","))
    assigned = ds.split_dataset(records, ratios, args.seed)
    if args.out:
        ds.save_manifest(assigned, args.out)
    else:
        for r in assigned:
            print(json.dumps(ds.record_to_doc(r), sort_keys=True))
    return 0


# --- scoring service -------------------------------------------------------


@dataclass
class ServeContext:
    envs: dict[str, Environment]
    kb: PlacementKB
    cfg: metrics.RewardConfig


def handle_request(doc: dict, ctx: ServeContext) -> dict:
    """Score one candidate program; never raises. Malformed candidates score
    LCS-only with violation PARSE_ERROR so the RL signal stays informative."""
    rid = doc.get("id")
    resp: dict = {"id": rid}
    try:
        candidate = prog.parse_program_lenient("\n".join(doc.get("candidate", [])))
        reference = doc.get("reference")
        norm = None
        if reference is not None:
            ref_prog = prog.parse_program_lenient("\n".join(reference))
            norm = metrics.normalized_lcs(candidate, ref_prog)
            resp["norm_lcs"] = norm
        executable = False
        violation = None
        if any(s.action is None for s in candidate.steps):
            violation = "PARSE_ERROR"
        else:
            env = ctx.envs.get(doc.get("env", ""))
            if env is None:
                violation = "UNKNOWN_ENV"
            else:
                env = env.copy()
                try:
                    if doc.get("prep", False):
                        env = prepare_scene(env, candidate, ctx.kb, doc.get("seed", 0))
                    ok, v = is_executable(candidate, env)
                    executable = ok
                    violation = v.code if v is not None else None
                except HomeprogError as e:
                    violation = type(e).__name__
        resp["executable"] = executable
        resp["reward"] = (norm or 0.0) + ctx.cfg.lambda_sim * (1.0 if executable else 0.0)
        if violation is not None:
            resp["violation"] = violation
        return resp
    except Exception as e:  # a bad request must never poison the service
        resp["executable"] = False
        resp["reward"] = 0.0
        resp["violation"] = "BAD_REQUEST"
        resp["error"] = str(e)
        return resp


def _serve_stream(instream, outstream, ctx: ServeContext) -> None:
    for line in instream:
        line = line.strip()
        if not line:
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as e:
            resp = {"id": None, "executable": False, "reward": 0.0,
                    "violation": "BAD_REQUEST", "error": str(e)}
        else:
            resp = handle_request(doc, ctx)
        outstream.write(json.dumps(resp, sort_keys=True) + "\n")
        outstream.flush()


def cmd_serve(args) -> int:
    env_dir = Path(args.envs) if args.envs else default_env_dir()
    envs = {
        f.stem.removesuffix(".env"): load_environment_file(f)
        for f in sorted(env_dir.glob("*.env.json"))
    }
    kb = load_kb_file(args.kb or default_kb_path())
    ctx = ServeContext(envs, kb, metrics.RewardConfig(lambda_sim=args.lambda_sim))
    if args.mode == "stdio":
        _serve_stream(sys.stdin, sys.stdout, ctx)
        return 0

    class Handler(socketserver.StreamRequestHandler):
        def handle(self):
            instream = (line.decode("utf-8") for line in self.rfile)

            class _Out:
                def write(inner, s):
                    self.wfile.write(s.encode("utf-8"))

                def flush(inner):
                    self.wfile.flush()

            _serve_stream(instream, _Out(), ctx)

    with socketserver.ThreadingTCPServer((args.host, args.port), Handler) as server:
        print(f"serving on {args.host}:{server.server_address[1]}", flush=True)
        server.serve_forever()
    return 0


# --- argument parsing ------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="homeprog")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="statically check a program file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("exec", help="ground and execute a program")
    p.add_argument("--env", required=True)
    p.add_argument("--program", required=True)
    p.add_argument("--prep", action="store_true")
    p.add_argument("--kb")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace")
    p.add_argument("--envs")
    p.set_defaults(func=cmd_exec)

    p = sub.add_parser("score", help="score predicted against reference programs")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--env")
    p.add_argument("--prep", action="store_true")
    p.add_argument("--kb")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lambda-sim", type=float, default=0.1)
    p.add_argument("--envs")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("gen", help="generate a paired description/program dataset")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--grammar")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("stats", help="corpus statistics for a manifest")
    p.add_argument("manifest")
    p.add_argument("--hist-dir")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("split", help="assign deterministic train/val/test splits")
    p.add_argument("manifest")
    p.add_argument("--ratios", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("serve", help="run the scoring service")
    p.add_argument("--mode", choices=("stdio", "tcp"), default="stdio")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=0)
    p.add_argument("--envs")
    p.add_argument("--kb")
    p.add_argument("--lambda-sim", type=float, default=0.1)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except (SchemaError, BadRatiosError, ConfigError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except HomeprogError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
