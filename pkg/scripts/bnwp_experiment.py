"""Minimise the largest per-nurse statistic on a zone, for each propagation mode,
with and without the implied per-bin totals.

    python scripts/bnwp_experiment.py [zone.txt] --time-limit 120
"""
import argparse

from bincp.cli import bundled
from bincp.models.bnwp import build_bnwp, load_zone


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("zone", nargs="?", default=None)
    ap.add_argument("--time-limit", type=float, default=120.0)
    args = ap.parse_args()
    zone = load_zone(args.zone or bundled("2zones0-zone1.txt"))
    for redundant in (True, False):
        for mode in ("gac", "gac-inc", "dec"):
            model = build_bnwp(zone, propagation=mode, redundant=redundant)
            res = model.solve(time_limit=args.time_limit)
            line = (f"totals={'on ' if redundant else 'off'} {mode:>8}: {res.status:>8} "
                    f"nodes={res.stats.nodes:<7} time={res.stats.time_s:.3f}s")
            if res.found:
                d = model.decode(res.solution)
                line += f" K={d['K']} occupancy={d['occurrences']}"
            print(line)


if __name__ == "__main__":
    main()
