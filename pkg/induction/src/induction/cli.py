"""Command-line entry point for training, evaluation, and baselines."""
from __future__ import annotations

import argparse
import subprocess
import sys
from pathlib import Path

from . import baselines as bl
from .data import DataError, by_split, load_manifest
from .evaluate import AlignmentError, evaluate_method, format_table, write_csv
from .model import ModelConfig, load_checkpoint, save_checkpoint
from .scorer import ScorerClient, ServiceUnavailable
from .train import predict, train_mle, train_pg


def _log(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def cmd_corpus(args) -> int:
    """Convenience wrapper around the data toolkit's gen + split commands."""
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = out / "manifest.jsonl"
    subprocess.run(
        ["homeprog", "gen", "--n", str(args.n), "--seed", str(args.seed),
         "--out", str(out)], check=True,
    )
    subprocess.run(
        ["homeprog", "split", str(manifest), "--ratios", args.ratios,
         "--seed", str(args.seed), "--out", str(manifest)], check=True,
    )
    print(f"wrote {manifest}")
    return 0


def cmd_train(args) -> int:
    cfg = ModelConfig.from_file(args.config) if args.config else ModelConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.lambda_sim is not None:
        cfg.lambda_sim = args.lambda_sim
    records = load_manifest(args.data)
    train = by_split(records, "TRAIN")
    if args.phase == "mle":
        model, _ = train_mle(train, cfg, log=_log)
    else:
        if not args.init:
            print("error: --phase pg requires --init CHECKPOINT", file=sys.stderr)
            return 2
        model = load_checkpoint(args.init)
        model.cfg.lambda_sim = cfg.lambda_sim
        model.cfg.seed = cfg.seed
        model.cfg.epochs_pg = cfg.epochs_pg
        with ScorerClient(args.scorer) as scorer:
            train_pg(model, train, model.cfg, scorer, env=args.env, log=_log)
    save_checkpoint(model, args.out)
    print(f"saved checkpoint to {args.out}")
    return 0


def cmd_eval(args) -> int:
    model = load_checkpoint(args.checkpoint)
    records = load_manifest(args.data)
    split = by_split(records, args.split)
    if not split:
        print(f"error: no records in split {args.split}", file=sys.stderr)
        return 2
    predictions = {r.id: predict(model, r) for r in split}
    result = evaluate_method("model", predictions, split, env=args.env)
    print(format_table([result]))
    if args.out:
        write_csv([result], args.out)
    return 0


def cmd_baselines(args) -> int:
    records = load_manifest(args.data)
    train = by_split(records, "TRAIN")
    test = by_split(records, args.split)
    if not train or not test:
        print("error: need non-empty TRAIN and evaluation splits", file=sys.stderr)
        return 2
    results = [
        evaluate_method("random-sampling", bl.random_sampling(train, test, args.seed),
                        test, env=args.env),
        evaluate_method("random-retrieval", bl.random_retrieval(train, test, args.seed),
                        test, env=args.env),
        evaluate_method("nearest-retrieval", bl.nearest_retrieval(train, test),
                        test, env=args.env),
    ]
    print(format_table(results))
    if args.out:
        write_csv(results, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="induction")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("corpus", help="generate and split a training corpus")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--ratios", default="0.8,0.1,0.1")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("train", help="train the induction model")
    p.add_argument("--phase", choices=("mle", "pg"), required=True)
    p.add_argument("--config")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--init")
    p.add_argument("--seed", type=int)
    p.add_argument("--lambda-sim", type=float)
    p.add_argument("--env", default="demo_home")
    p.add_argument("--scorer", default="stdio:homeprog serve --mode stdio")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on a split")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--split", default="TEST")
    p.add_argument("--env", default="demo_home")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("baselines", help="run the non-neural baselines")
    p.add_argument("--data", required=True)
    p.add_argument("--split", default="TEST")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--env", default="demo_home")
    p.add_argument("--out")
    p.set_defaults(func=cmd_baselines)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except (DataError, AlignmentError, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ServiceUnavailable, subprocess.CalledProcessError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
