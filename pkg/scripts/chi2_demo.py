"""Bin counts forced to pass a goodness-of-fit test at two significance levels.

    python scripts/chi2_demo.py --seed 4
"""
import argparse

from bincp.models.study import build_chi2_demo
from bincp.stats import pearson_statistic


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=4)
    args = ap.parse_args()
    for alpha in (0.95, 0.99):
        demo = build_chi2_demo(args.seed, alpha)
        res = demo.solver.solve(demo.xs, time_limit=60)
        if not res.found:
            print(f"alpha={alpha}: {res.status}")
            continue
        counts = [res.solution[c] for c in demo.cs]
        stat = float(pearson_statistic(counts, demo.targets))
        print(f"alpha={alpha}: counts={counts} targets={list(demo.targets)} "
              f"statistic={stat:.4f} <= threshold={demo.threshold:.4f}")


if __name__ == "__main__":
    main()
