"""Solve a curriculum instance under each bin_counts propagation mode.

    python scripts/bacp_experiment.py [instance.txt] --time-limit 60
"""
import argparse

from bincp.cli import bundled
from bincp.models.bacp import build_bacp, check_schedule, load_bacp
from bincp.stats import pearson_statistic


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("instance", nargs="?", default=None)
    ap.add_argument("--time-limit", type=float, default=60.0)
    ap.add_argument("--alpha", type=float, default=0.99)
    args = ap.parse_args()
    inst = load_bacp(args.instance or bundled("bacp-1.txt"))
    for mode in ("gac", "gac-inc", "dec"):
        model = build_bacp(inst, alpha=args.alpha, propagation=mode)
        res = model.solve(time_limit=args.time_limit)
        line = f"{inst.name} {mode:>8}: {res.status:>9} nodes={res.stats.nodes:<7} time={res.stats.time_s:.3f}s"
        if res.found:
            d = model.decode(res.solution)
            bad = check_schedule(inst, d["semester"], model.bins, model.targets, model.threshold)
            stat = float(pearson_statistic(d["occurrences"], model.targets))
            line += f" loads={d['load']} statistic={stat:.4f} checker={'ok' if not bad else bad}"
        print(line)


if __name__ == "__main__":
    main()
