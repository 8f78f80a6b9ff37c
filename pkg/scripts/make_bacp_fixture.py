"""Regenerate the bundled ``bacp-1`` fixture.

The instance keeps the published shape (50 courses, 10 semesters, 2..10
courses and 2..100 credits per semester) and is built around a planted
schedule whose semester loads are 50 34 29 17 7 33 23 29 24 17, so that load
vector is guaranteed to be realisable. Prerequisites only point forward in
the planted schedule and course identifiers are shuffled.

    python scripts/make_bacp_fixture.py > src/bincp/data/bacp-1.txt
"""
from __future__ import annotations

import argparse

import numpy as np

from bincp.models.bacp import BacpInstance, format_bacp

LOADS = (50, 34, 29, 17, 7, 33, 23, 29, 24, 17)
COURSES = 50
MAX_CREDITS = 7


def course_counts(loads, total):
    raw = [l * total / sum(loads) for l in loads]
    counts = [max(2, min(10, round(r))) for r in raw]
    order = sorted(range(len(loads)), key=lambda j: raw[j] - counts[j])
    while sum(counts) < total:
        j = next(j for j in reversed(order) if counts[j] < 10 and loads[j] >= counts[j] + 1)
        counts[j] += 1
    while sum(counts) > total:
        j = next(j for j in order if counts[j] > 2 and loads[j] <= MAX_CREDITS * (counts[j] - 1))
        counts[j] -= 1
    return counts


def split_load(rng, load, parts):
    """Uniform-ish composition of ``load`` into ``parts`` values in [1, MAX_CREDITS]."""
    while True:
        cuts = np.sort(rng.choice(np.arange(1, load), size=parts - 1, replace=False))
        pieces = np.diff(np.concatenate(([0], cuts, [load])))
        if pieces.max() <= MAX_CREDITS:
            return [int(p) for p in pieces]


def build(seed: int, num_prereqs: int) -> tuple[BacpInstance, list[int]]:
    rng = np.random.default_rng(seed)
    counts = course_counts(LOADS, COURSES)
    credits, planted = [], []
    for j, (load, c) in enumerate(zip(LOADS, counts)):
        credits += split_load(rng, load, c)
        planted += [j + 1] * c
    perm = rng.permutation(COURSES)
    credits = [credits[p] for p in perm]
    planted = [planted[p] for p in perm]
    pairs = set()
    while len(pairs) < num_prereqs:
        a, b = (int(v) for v in rng.integers(0, COURSES, size=2))
        if planted[a] < planted[b]:
            pairs.add((a, b))
    inst = BacpInstance(credits, sorted(pairs), 10, 2, 10, 2, 100,
                        [f"c{i + 1:02d}" for i in range(COURSES)], "bacp-1")
    inst.validate()
    return inst, planted


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--prereqs", type=int, default=33)
    args = ap.parse_args()
    inst, planted = build(args.seed, args.prereqs)
    print(f"# reconstructed bacp-1 (seed {args.seed}); planted semesters:")
    print("# " + " ".join(map(str, planted)))
    print(format_bacp(inst), end="")


if __name__ == "__main__":
    main()
