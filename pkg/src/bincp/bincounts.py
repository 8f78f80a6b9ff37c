"""The ``bin_counts`` constraint.

``bin_counts(x_1..x_n; c_1..c_m)`` holds iff each ``c_j`` equals the number of
``x_i`` lying in ``[b_j, b_{j+1})``. In strict mode every ``x_i`` must fall in
some bin; in hidden-bin mode out-of-range values are simply not counted.

Three posting routes are offered: a decomposition over a global cardinality
constraint and linear sums, a full GAC propagator that recomputes flow bounds
on every call, and an incremental GAC propagator that keeps one stored
boolean per (value variable, bin) pair and skips arcs a value-variable
trigger cannot have affected.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import constraints
from .flow import BinGraph, BinSpec, arc_status, count_range, feasible_flow
from .kernel import Inconsistent, Propagator, Solver, StoredBool

MODES = ("strict", "hidden")
PROPAGATION = ("dec", "gac", "gac-inc")


def as_bins(bins) -> BinSpec:
    return bins if isinstance(bins, BinSpec) else BinSpec(tuple(bins))


def bin_counts(values: Sequence[int], bins, hidden: bool = False) -> list[int]:
    """Histogram of ``values``. Raises ValueError for an out-of-range value in strict mode."""
    spec = as_bins(bins)
    counts = [0] * spec.m
    for v in values:
        j = spec.bin_of(v)
        if j is None:
            if hidden:
                continue
            raise ValueError(f"value {v} lies outside [{spec.lo}, {spec.hi})")
        counts[j] += 1
    return counts


def check(assignment: Sequence[int], counts: Sequence[int], bins, hidden: bool = False) -> bool:
    spec = as_bins(bins)
    if len(counts) != spec.m:
        return False
    try:
        return bin_counts(assignment, spec, hidden) == list(counts)
    except ValueError:
        return False


@dataclass
class BinCountsSpec:
    xs: list[int]
    cs: list[int]
    bins: BinSpec
    mode: str = "strict"
    propagation: str = "gac"

    def __post_init__(self):
        self.bins = as_bins(self.bins)
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.propagation not in PROPAGATION:
            raise ValueError(f"propagation must be one of {PROPAGATION}")
        if len(self.cs) != self.bins.m:
            raise ValueError(f"{len(self.cs)} count variables for {self.bins.m} bins")


def post(s: Solver, spec: BinCountsSpec):
    hidden = spec.mode == "hidden"
    if spec.propagation == "dec":
        return post_decomposition(s, spec.xs, spec.cs, spec.bins, hidden)
    cls = BinCountsGAC if spec.propagation == "gac" else BinCountsIncremental
    return s.post(cls(spec.xs, spec.cs, spec.bins, hidden))


def post_bin_counts(s: Solver, xs: Sequence[int], cs: Sequence[int], bins,
                    hidden: bool = False, propagation: str = "gac"):
    return post(s, BinCountsSpec(list(xs), list(cs), as_bins(bins),
                                 "hidden" if hidden else "strict", propagation))


def post_decomposition(s: Solver, xs: Sequence[int], cs: Sequence[int], bins,
                       hidden: bool = False) -> list[int]:
    """GCC over per-value occurrence variables, per-bin sums, and a total.

    Occurrence variables are created only for in-range values present in some
    domain. Returns them.
    """
    spec = as_bins(bins)
    n = len(xs)
    present = sorted({v for x in xs for v in s.values(x) if spec.bin_of(v) is not None})
    occ = [s.int_var(0, n, f"o[{k}]") for k in present]
    if present:
        constraints.post_gcc(s, xs, present, occ)
    by_bin: list[list[int]] = [[] for _ in range(spec.m)]
    for k, o in zip(present, occ):
        by_bin[spec.bin_of(k)].append(o)
    for j, c in enumerate(cs):
        constraints.post_linear(s, [(1, o) for o in by_bin[j]] + [(-1, c)], "=", 0)
    constraints.post_linear(s, [(1, c) for c in cs], "<=" if hidden else "=", n)
    return occ


class BinCountsGAC(Propagator):
    """Full recomputation on every call (one flow, count augmentations, one SCC pass)."""

    idempotent = True

    def __init__(self, xs: Sequence[int], cs: Sequence[int], bins, hidden: bool = False):
        self.xs = list(xs)
        self.cs = list(cs)
        self.bins = as_bins(bins)
        self.hidden = hidden
        if len(self.cs) != self.bins.m:
            raise ValueError(f"{len(self.cs)} count variables for {self.bins.m} bins")
        self.vars = self.xs + self.cs
        self.n = len(self.xs)
        self.m = self.bins.m

    def watch(self):
        return [False] * self.n + [True] * self.m

    def check(self, values):
        return check(values[:self.n], values[self.n:], self.bins, self.hidden)

    # -- shared pieces ---------------------------------------------------

    def _graph(self, s: Solver) -> BinGraph:
        b = self.bins.boundaries
        lo_all, hi_all = b[0], b[-1]
        m = self.m
        arcs = []
        for x in self.xs:
            xmin, xmax = s.min(x), s.max(x)
            row = []
            if xmax >= lo_all and xmin < hi_all:
                mask = s.masks[x]
                for j in range(m):
                    if b[j] > xmax:
                        break
                    if b[j + 1] <= xmin:
                        continue
                    if mask & s.range_mask(x, b[j], b[j + 1]):
                        row.append(j)
            if self.hidden and (xmin < lo_all or xmax >= hi_all):
                row.append(m)
            if not row:
                raise Inconsistent(s.names[x])
            arcs.append(row)
        lo = [s.min(c) for c in self.cs]
        hi = [s.max(c) for c in self.cs]
        if self.hidden:
            lo.append(0)
            hi.append(self.n)
        return BinGraph(self.n, self.bins, self.hidden, arcs, lo, hi)

    def _trim(self, s: Solver) -> None:
        if not self.hidden:
            for x in self.xs:
                s.keep_range(x, self.bins.lo, self.bins.hi)

    def _update_bins(self, s: Solver) -> tuple[BinGraph, list[int]]:
        """Tighten every count variable to its flow range; returns the graph and flow used."""
        while True:
            g = self._graph(s)
            assign = feasible_flow(g)
            if assign is None:
                raise Inconsistent("bin_counts")
            jumped = False
            for j, c in enumerate(self.cs):
                lo, hi = count_range(g, assign, j)
                s.set_min(c, lo)
                s.set_max(c, hi)
                # a hole in Dom(c_j) moved a bound past the flow range: the graph is stale
                if s.min(c) != lo or s.max(c) != hi:
                    jumped = True
            if not jumped:
                return g, assign

    def _remove_bin(self, s: Solver, x: int, j: int) -> None:
        if j == self.m:
            s.remove_range(x, s.min(x), self.bins.lo)
            s.remove_range(x, self.bins.hi, s.max(x) + 1)
        else:
            s.remove_range(x, *self.bins.interval(j))

    def _keep_bin(self, s: Solver, x: int, j: int) -> None:
        if j == self.m:
            s.remove_range(x, self.bins.lo, self.bins.hi)
        else:
            s.keep_range(x, *self.bins.interval(j))

    def propagate(self, s: Solver) -> None:
        self._trim(s)
        g, assign = self._update_bins(s)
        for (i, j), (flo, fhi) in arc_status(g, assign).items():
            if flo == 1:
                self._keep_bin(s, self.xs[i], j)
            elif fhi == 0:
                self._remove_bin(s, self.xs[i], j)


class BinCountsIncremental(BinCountsGAC):
    """Incremental variant with stored booleans ``g[i][j]``.

    ``g[i][j]`` is True iff ``Dom(x_i)`` may still meet bin ``j``; it is only
    ever cleared by this propagator. When woken by value variables only, arc
    (i, j) is revisited iff some trigger ``v`` had ``g[v][j]`` and ``g[i][j]``
    is still set. Count-variable triggers revisit every arc. Modifications
    made by the propagator itself wake it again with the modified variables
    as triggers.
    """

    idempotent = False

    def __init__(self, xs, cs, bins, hidden: bool = False):
        super().__init__(xs, cs, bins, hidden)
        self._pending: set[int] = set()
        self._state: GACState | None = None

    def notify(self, local: int) -> None:
        self._pending.add(local)

    def discard(self) -> None:
        self._pending.clear()

    def _init_state(self, s: Solver) -> "GACState":
        if self._state is None or self._state.solver is not s:
            self._state = GACState(s, self.n, self.m + (1 if self.hidden else 0))
        return self._state

    def propagate(self, s: Solver) -> None:
        triggers, self._pending = self._pending, set()
        st = self._init_state(s)
        if not st.ready.get():
            BinCountsGAC.propagate(self, s)
            st.reset_from(s, self)
            self._pending.clear()
            return
        self._trim(s)
        g, assign = self._update_bins(s)
        value_triggers = [t for t in triggers if t < self.n]
        full = not value_triggers or any(t >= self.n for t in triggers)
        M = g.num_bins
        rows = st.g
        if full:
            ghat = [True] * M
        else:
            ghat = [any(rows[v][j].get() for v in value_triggers) for j in range(M)]
        status = arc_status(g, assign)
        for i in range(self.n):
            x = self.xs[i]
            row = rows[i]
            for j in range(M):
                if not full and not (ghat[j] and row[j].get()):
                    continue
                flo, fhi = status.get((i, j), (0, 0))
                if flo == 1:
                    self._keep_bin(s, x, j)
                    for l in range(M):
                        if l != j:
                            row[l].set(False)
                elif fhi == 0:
                    self._remove_bin(s, x, j)
                    row[j].set(False)


class GACState:
    """Stored booleans of the incremental propagator, plus a trailed 'initialised' flag."""

    def __init__(self, s: Solver, n: int, num_bins: int):
        self.solver = s
        self.ready = StoredBool(s, False)
        self.g = [[StoredBool(s, True) for _ in range(num_bins)] for _ in range(n)]

    def reset_from(self, s: Solver, prop: BinCountsGAC) -> None:
        m = prop.m
        for i, x in enumerate(prop.xs):
            for j, cell in enumerate(self.g[i]):
                if j == m:
                    meets = s.min(x) < prop.bins.lo or s.max(x) >= prop.bins.hi
                else:
                    meets = s.intersects(x, *prop.bins.interval(j))
                cell.set(meets)
        self.ready.set(True)


def projection(s: Solver, vars: Sequence[int]) -> list[list[int]]:
    return [s.values(v) for v in vars]
