"""Random ``bin_counts`` instances and a Dec / GAC / GAC-incremental comparison."""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from ..bincounts import PROPAGATION, post_bin_counts
from ..constraints import post_chi2_threshold
from ..flow import BinSpec
from ..kernel import SearchStats, Solver, dfs_search
from ..stats import chi2_inverse_cdf

FRACTIONS = (0.0, 0.2, 0.4, 0.6, 0.8)


@dataclass(frozen=True)
class RandomStudyConfig:
    """Sampling order with ``numpy.random.default_rng(seed)`` (PCG64):
    for each value variable, ``draws`` integers from ``[0, value_hi)``;
    then for each bin an upper count bound ``U_j`` from ``[0, n + 1)``.
    """

    seed: int = 0
    n: int = 15
    m: int = 9
    width: int = 5
    draws: int = 10
    value_hi: int = 60
    fraction: float = 0.8
    mode: str = "strict"

    def __post_init__(self):
        if self.n < 0 or self.m < 1 or self.width < 1 or self.draws < 1:
            raise ValueError("invalid generator sizes")
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError("fraction must lie in [0, 1]")
        if self.mode not in ("strict", "hidden"):
            raise ValueError("mode must be strict or hidden")


@dataclass
class RandomInstance:
    config: RandomStudyConfig
    domains: list[list[int]]
    count_hi: list[int]
    bins: BinSpec

    @property
    def goal_size(self) -> int:
        return int(self.config.n * self.config.fraction)

    def build(self, propagation: str) -> tuple[Solver, list[int], list[int]]:
        s = Solver()
        xs = [s.new_var(d, f"x[{i + 1}]") for i, d in enumerate(self.domains)]
        cs = [s.int_var(0, u, f"c[{j + 1}]") for j, u in enumerate(self.count_hi)]
        post_bin_counts(s, xs, cs, self.bins, self.config.mode == "hidden", propagation)
        return s, xs, cs


def generate_random(config: RandomStudyConfig) -> RandomInstance:
    rng = np.random.default_rng(config.seed)
    domains = [sorted({int(v) for v in rng.integers(0, config.value_hi, size=config.draws)})
               for _ in range(config.n)]
    count_hi = [int(u) for u in rng.integers(0, config.n + 1, size=config.m)]
    bins = BinSpec(tuple(config.width * i for i in range(config.m + 1)))
    return RandomInstance(config, domains, count_hi, bins)


def worked_example(propagation: str = "gac") -> tuple[Solver, list[int], list[int]]:
    """Three value variables and two bins ``[1,3)``, ``[3,5)``, as used in the docs and tests."""
    s = Solver()
    xs = [s.new_var(d, f"x[{i + 1}]") for i, d in enumerate([[3, 4], [1, 2, 4], [2, 3, 4]])]
    cs = [s.new_var([1, 2, 3], "c[1]"), s.new_var([0, 1], "c[2]")]
    post_bin_counts(s, xs, cs, (1, 3, 5), propagation=propagation)
    return s, xs, cs


@dataclass
class ModeReport:
    instance: str
    mode: str
    root_feasible: bool
    domain_sizes: list[int]
    nodes: int
    failures: int
    time_s: float
    status: str

    @property
    def total_size(self) -> int:
        return sum(self.domain_sizes)


def root_domains(s: Solver, vars: Sequence[int]) -> tuple[bool, list[int]]:
    s.push()
    s.schedule_all()
    ok = s.propagate()
    sizes = [s.size(v) if ok else 0 for v in vars]
    s.pop()
    return ok, sizes


def run_mode(inst: RandomInstance, propagation: str, strategy: str = "mindom",
             time_limit: float | None = None, name: str | None = None) -> ModeReport:
    s, xs, cs = inst.build(propagation)
    ok, sizes = root_domains(s, xs + cs)
    stats = SearchStats()
    res = dfs_search(s, xs[:inst.goal_size], strategy, time_limit, complete=False, stats=stats)
    return ModeReport(name or f"seed{inst.config.seed}", propagation, ok, sizes,
                      stats.nodes, stats.failures, stats.time_s, res.status)


def compare_filtering(inst: RandomInstance, strategy: str = "mindom",
                      modes: Sequence[str] = PROPAGATION, time_limit: float | None = None,
                      name: str | None = None) -> list[ModeReport]:
    """Root domain sizes and search effort to reach the goal, one report per propagation mode."""
    return [run_mode(inst, mode, strategy, time_limit, name) for mode in modes]


def satisfiable(inst: RandomInstance, time_limit: float | None = None) -> bool | None:
    """Solve to a full assignment with GAC; None on timeout."""
    s, xs, cs = inst.build("gac")
    res = dfs_search(s, xs + cs, "mindom", time_limit)
    return None if res.status == "timeout" else res.found


def report_rows(reports: Sequence[ModeReport]) -> list[dict]:
    """Flat dicts for CSV/JSON; adds a per-row dominance flag against the Dec run."""
    by_inst: dict[str, dict[str, ModeReport]] = {}
    for r in reports:
        by_inst.setdefault(r.instance, {})[r.mode] = r
    rows = []
    for r in reports:
        dec = by_inst[r.instance].get("dec")
        row = asdict(r)
        row["total_size"] = r.total_size
        row["dominates_dec"] = None if dec is None else all(
            a <= b for a, b in zip(r.domain_sizes, dec.domain_sizes))
        rows.append(row)
    return rows


@dataclass
class Chi2Demo:
    solver: Solver
    xs: list[int]
    cs: list[int]
    targets: tuple[int, ...]
    threshold: float
    upper: list[int] = field(default_factory=list)


def build_chi2_demo(seed: int = 4, alpha: float = 0.95, n: int = 24,
                    targets: Sequence[int] = (2, 4, 10, 4, 2, 2), width: int = 5,
                    propagation: str = "gac") -> Chi2Demo:
    """Values ``x_i`` in ``0..U_i`` (``U_i`` drawn from ``[0, width*m)``) whose bin
    histogram must pass the goodness-of-fit test against ``targets`` at level ``alpha``."""
    targets = tuple(targets)
    m = len(targets)
    rng = np.random.default_rng(seed)
    upper = [int(u) for u in rng.integers(0, width * m, size=n)]
    s = Solver()
    xs = [s.int_var(0, u, f"x[{i + 1}]") for i, u in enumerate(upper)]
    cs = [s.int_var(0, n, f"c[{j + 1}]") for j in range(m)]
    bins = BinSpec(tuple(width * i for i in range(m + 1)))
    post_bin_counts(s, xs, cs, bins, propagation=propagation)
    threshold = chi2_inverse_cdf(m - 1, 1.0 - alpha)
    post_chi2_threshold(s, cs, targets, threshold)
    return Chi2Demo(s, xs, cs, targets, threshold, upper)


def timed(fn, *args, **kwargs):
    t = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t
