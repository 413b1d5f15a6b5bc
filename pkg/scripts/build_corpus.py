#!/usr/bin/env python3
"""Build a split synthetic corpus and report its statistics.

Equivalent to running `homeprog gen`, `homeprog split`, and `homeprog stats`
in sequence, with the histograms written next to the manifest.
"""
import argparse
import json
import sys
from pathlib import Path

from homeprog import cli


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=5000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--ratios", default="0.8,0.1,0.1")
    parser.add_argument("--grammar", help="grammar config (default: bundled)")
    parser.add_argument("--out", required=True)
    args = parser.parse_args()

    out = Path(args.out)
    manifest = out / "manifest.jsonl"
    gen_args = ["gen", "--n", str(args.n), "--seed", str(args.seed), "--out", str(out)]
    if args.grammar:
        gen_args += ["--grammar", args.grammar]
    for argv in (
        gen_args,
        ["split", str(manifest), "--ratios", args.ratios, "--seed", str(args.seed),
         "--out", str(manifest)],
        ["stats", str(manifest), "--hist-dir", str(out)],
    ):
        code = cli.main(argv)
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
