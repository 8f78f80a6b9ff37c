"""Balanced nursing workload: spread patient acuities evenly over nurses.

Each nurse takes ``S`` patient slots. The per-nurse statistic measures how far
the nurse's acuity histogram is from the target histogram; the model minimises
the largest of these statistics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .. import constraints
from ..bincounts import bin_counts, post_bin_counts
from ..flow import BinSpec
from ..kernel import Solver
from ..stats import pearson_statistic
from .errors import InstanceError

DEFAULT_BINS = (0, 30, 60, 100)
DEFAULT_TARGETS = (2, 2, 2)


@dataclass(frozen=True)
class BnwpZone:
    acuities: tuple[int, ...]
    slots: int = 6
    name: str = "zone"

    def __post_init__(self):
        if self.slots < 1:
            raise InstanceError("slots per nurse must be positive")
        if not self.acuities:
            raise InstanceError("zone has no patients")
        if any(a < 0 for a in self.acuities):
            raise InstanceError("acuities must be nonnegative")

    @property
    def patients(self) -> int:
        return len(self.acuities)

    @property
    def nurses(self) -> int:
        return math.ceil(self.patients / self.slots)

    @property
    def padded(self) -> tuple[int, ...]:
        """Acuities extended with zero-acuity dummies up to ``nurses * slots``."""
        return self.acuities + (0,) * (self.nurses * self.slots - self.patients)


def parse_zone(text: str, name: str = "zone") -> BnwpZone:
    """Header ``<zone-label> <slots>``, then whitespace-separated acuities."""
    tokens: list[tuple[str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        tokens += [(t, lineno) for t in raw.split("#", 1)[0].split()]
    if len(tokens) < 2:
        raise InstanceError("zone file needs a '<zone> <slots>' header")
    label = tokens[0][0]
    values = []
    for tok, lineno in tokens[1:]:
        try:
            values.append(int(tok))
        except ValueError:
            raise InstanceError(f"line {lineno}: '{tok}' is not an integer") from None
    return BnwpZone(tuple(values[1:]), values[0], f"{name}:{label}")


def load_zone(path: str | Path) -> BnwpZone:
    path = Path(path)
    return parse_zone(path.read_text(), path.stem)


@dataclass
class BnwpModel:
    solver: Solver
    zone: BnwpZone
    slot: list[list[int]]
    acuity: list[list[int]]
    occurrences: list[list[int]]
    objective: int
    bins: BinSpec
    targets: tuple[int, ...]
    scale: int

    @property
    def goal(self) -> list[int]:
        return [g for row in self.slot for g in row]

    def solve(self, strategy: str = "mindom", time_limit: float | None = None):
        return self.solver.minimize(self.objective, self.goal, strategy, time_limit)

    def decode(self, solution: Sequence[int]) -> dict:
        occ = [[solution[o] for o in row] for row in self.occurrences]
        return {
            "slot": [[solution[g] for g in row] for row in self.slot],
            "acuity": [[solution[c] for c in row] for row in self.acuity],
            "occurrences": occ,
            "statistic": [float(pearson_statistic(o, self.targets)) for o in occ],
            "K": solution[self.objective] / self.scale,
        }


def build_bnwp(zone: BnwpZone, bins: BinSpec | Sequence[int] = DEFAULT_BINS,
               targets: Sequence[int] = DEFAULT_TARGETS, propagation: str = "gac",
               symmetry: bool = True, redundant: bool = True) -> BnwpModel:
    """Minimise the largest per-nurse statistic.

    The objective variable holds the statistic scaled by ``lcm(targets)`` so it
    stays integral. ``redundant`` adds, per bin, the fact that occurrences
    summed over nurses equal the number of padded patients in that bin.
    """
    bins = bins if isinstance(bins, BinSpec) else BinSpec(tuple(bins))
    targets = tuple(int(t) for t in targets)
    if len(targets) != bins.m:
        raise InstanceError(f"{len(targets)} targets for {bins.m} bins")
    if sum(targets) != zone.slots:
        raise InstanceError(f"targets sum to {sum(targets)}, expected {zone.slots} slots")
    acuity = zone.padded
    try:
        per_bin = bin_counts(acuity, bins)
    except ValueError as exc:
        raise InstanceError(str(exc)) from None
    N, S, P = zone.nurses, zone.slots, len(acuity)
    scale = constraints._lcm(targets)
    worst = max(pearson_scaled_extreme(S, targets, scale), 0)

    s = Solver()
    g = [[s.int_var(1, P, f"g[{n + 1},{k + 1}]") for k in range(S)] for n in range(N)]
    c = [[s.int_var(min(acuity), max(acuity), f"c[{n + 1},{k + 1}]") for k in range(S)] for n in range(N)]
    o = [[s.int_var(0, S, f"o[{n + 1},{k + 1}]") for k in range(bins.m)] for n in range(N)]
    K = s.int_var(0, worst, "K")
    constraints.post_all_different(s, [v for row in g for v in row])
    for n in range(N):
        for k in range(S):
            constraints.post_element(s, c[n][k], acuity, g[n][k])
        post_bin_counts(s, c[n], o[n], bins, propagation=propagation)
    constraints.post_max_chi2(s, o, targets, K)
    if symmetry:
        for n in range(N):
            for k in range(S - 1):
                constraints.post_linear(s, [(1, g[n][k]), (-1, g[n][k + 1])], "<", 0)
        for n in range(N - 1):
            constraints.post_linear(s, [(1, g[n][0]), (-1, g[n + 1][0])], "<", 0)
    if redundant:
        for k in range(bins.m):
            constraints.post_linear(s, [(1, o[n][k]) for n in range(N)], "=", per_bin[k])
    return BnwpModel(s, zone, g, c, o, K, bins, targets, scale)


def pearson_scaled_extreme(slots: int, targets: Sequence[int], scale: int) -> int:
    """Largest scaled statistic any histogram of ``slots`` items can reach."""
    best = 0
    for k in range(len(targets)):
        hist = [0] * len(targets)
        hist[k] = slots
        best = max(best, int(pearson_statistic(hist, targets) * scale))
    return best


def check_allocation(zone: BnwpZone, slot: Sequence[Sequence[int]], bins: BinSpec | Sequence[int],
                     targets: Sequence[int], K: float) -> list[str]:
    """Independent check: an injective cover of all padded patients with every statistic <= K."""
    bins = bins if isinstance(bins, BinSpec) else BinSpec(tuple(bins))
    acuity = zone.padded
    flat = [p for row in slot for p in row]
    problems = []
    if sorted(flat) != list(range(1, len(acuity) + 1)):
        problems.append("slots are not a permutation of the padded patients")
        return problems
    for n, row in enumerate(slot):
        if len(row) != zone.slots:
            problems.append(f"nurse {n + 1}: {len(row)} slots")
        hist = bin_counts([acuity[p - 1] for p in row], bins)
        stat = pearson_statistic(hist, targets)
        if stat > K + 1e-12:
            problems.append(f"nurse {n + 1}: statistic {float(stat):.4f} exceeds {K}")
    return problems
