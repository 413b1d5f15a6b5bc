#!/usr/bin/env python3
"""Pairwise-similarity report for a dataset manifest.

Writes the full normalized-LCS similarity matrix as CSV (row/column order =
manifest order) and prints corpus diversity summary numbers.
"""
import argparse
import csv
import sys

from homeprog import dataset as hd
from homeprog import metrics as hm


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("manifest")
    parser.add_argument("--out", required=True, help="CSV path for the matrix")
    parser.add_argument("--limit", type=int, default=500,
                        help="cap on records included in the matrix")
    args = parser.parse_args()

    records = hd.load_manifest(args.manifest)[: args.limit]
    programs = [r.program for r in records]
    matrix = hm.pairwise_similarity(programs)

    with open(args.out, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["id"] + [r.id for r in records])
        for r, row in zip(records, matrix):
            writer.writerow([r.id] + [f"{v:.4f}" for v in row])

    mean_lcs, mean_norm = hm.diversity_stats(programs)
    print(f"records: {len(records)}")
    print(f"mean pairwise LCS length: {mean_lcs:.3f}")
    print(f"mean pairwise normalized LCS: {mean_norm:.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
