"""Simultaneous multinomial intervals for a count vector.

    python scripts/ci_table.py --counts 3,5,2 --alpha 0.1
"""
import argparse

from bincp.stats import MultinomialSample, ci_solve


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--counts", default="3,5,2")
    ap.add_argument("--alpha", type=float, default=0.1)
    args = ap.parse_args()
    counts = tuple(int(c) for c in args.counts.split(","))
    for j, (lo, hi) in enumerate(ci_solve(MultinomialSample(counts), args.alpha), 1):
        print(f"p{j}: ({lo:.4f}, {hi:.4f})")


if __name__ == "__main__":
    main()
