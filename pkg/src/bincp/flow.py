"""Bipartite flow model of ``bin_counts`` and exact integral bounds.

Value node ``i`` sends exactly one unit to some bin node ``j`` it has an arc
to; bin ``j`` forwards between ``lo[j]`` and ``hi[j]`` units to the sink. The
constraint matrix is totally unimodular, so everything here is solved with
integral augmenting paths instead of a general LP:

* a feasible flow is found by greedy assignment followed by overflow and
  underflow repair along alternating paths;
* ``min/max c_j`` by repeated augmentation from a feasible flow;
* arc bounds from strongly connected components of the residual graph: a
  flow value on arc (i, j) can change iff both endpoints share a component.
"""
from __future__ import annotations

from bisect import bisect_right
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .kernel import Inconsistent, IntDomain


@dataclass(frozen=True)
class BinSpec:
    """Half-open integer bins ``[b_j, b_{j+1})`` from strictly increasing boundaries."""

    boundaries: tuple[int, ...]

    def __post_init__(self):
        b = tuple(int(x) for x in self.boundaries)
        if len(b) < 2:
            raise ValueError("need at least two boundaries")
        if any(b2 <= b1 for b1, b2 in zip(b, b[1:])):
            raise ValueError(f"boundaries must be strictly increasing: {b}")
        object.__setattr__(self, "boundaries", b)

    @property
    def m(self) -> int:
        return len(self.boundaries) - 1

    @property
    def lo(self) -> int:
        return self.boundaries[0]

    @property
    def hi(self) -> int:
        return self.boundaries[-1]

    def interval(self, j: int) -> tuple[int, int]:
        return self.boundaries[j], self.boundaries[j + 1]

    def bin_of(self, v: int) -> int | None:
        """0-based bin index of ``v``, or None outside ``[b_1, b_{m+1})``."""
        if v < self.lo or v >= self.hi:
            return None
        return bisect_right(self.boundaries, v) - 1


@dataclass
class BinGraph:
    """Value nodes ``0..n-1``, bin nodes ``0..M-1`` (``M = m + 1`` with a hidden bin).

    ``arcs[i]`` lists the bins whose interval meets ``Dom(x_i)``;
    ``labels[(i, j)]`` holds those values when the graph was built from
    explicit domains (propagators skip labels).
    """

    n: int
    bins: BinSpec
    hidden: bool
    arcs: list[list[int]]
    lo: list[int]
    hi: list[int]
    labels: dict[tuple[int, int], tuple[int, ...]] | None = None

    @property
    def num_bins(self) -> int:
        return len(self.lo)

    def has_arc(self, i: int, j: int) -> bool:
        return j in self.arcs[i]

    def restricted(self, fixed: Iterable[tuple[int, int, int]]) -> "BinGraph":
        """Copy with arc fixings ``(i, j, 0|1)`` applied."""
        arcs = [list(a) for a in self.arcs]
        for i, j, f in fixed:
            if j not in self.arcs[i]:
                raise ValueError(f"no arc ({i}, {j})")
            if f:
                arcs[i] = [j] if j in arcs[i] else []
            elif j in arcs[i]:
                arcs[i].remove(j)
        return BinGraph(self.n, self.bins, self.hidden, arcs, list(self.lo), list(self.hi))


@dataclass
class FlowBounds:
    counts: list[tuple[int, int]]
    arcs: dict[tuple[int, int], tuple[int, int]] = field(default_factory=dict)


def build_graph(domains: Sequence[Iterable[int]], bins: BinSpec,
                count_bounds: Sequence[tuple[int, int]], hidden_bin: bool = False) -> BinGraph:
    if len(count_bounds) != bins.m:
        raise ValueError(f"expected {bins.m} count bounds, got {len(count_bounds)}")
    n = len(domains)
    arcs: list[list[int]] = []
    labels: dict[tuple[int, int], tuple[int, ...]] = {}
    for i, dom in enumerate(domains):
        per_bin: dict[int, list[int]] = {}
        for v in sorted(set(dom)):
            j = bins.bin_of(v)
            if j is None:
                if not hidden_bin:
                    continue
                j = bins.m
            per_bin.setdefault(j, []).append(v)
        if not per_bin:
            raise Inconsistent(f"x{i} has no value inside any bin")
        arcs.append(sorted(per_bin))
        for j, vals in per_bin.items():
            labels[(i, j)] = tuple(vals)
    lo = [int(a) for a, _ in count_bounds]
    hi = [int(b) for _, b in count_bounds]
    if hidden_bin:
        lo.append(0)
        hi.append(n)
    return BinGraph(n, bins, hidden_bin, arcs, lo, hi, labels)


# -- flow primitives ------------------------------------------------------

def _members(g: BinGraph, assign: Sequence[int]) -> list[list[int]]:
    members: list[list[int]] = [[] for _ in range(g.num_bins)]
    for i, j in enumerate(assign):
        members[j].append(i)
    return members


def _shift(g: BinGraph, assign: list[int], counts: list[int],
           sources: Sequence[int], accept) -> bool:
    """Move one unit along an alternating path from a source bin to a bin
    satisfying ``accept``; intermediate bins keep their counts."""
    members = _members(g, assign)
    parent: dict[int, tuple[int, int] | None] = {}
    q: deque[int] = deque()
    for a in sources:
        if a not in parent:
            parent[a] = None
            q.append(a)
    arcs = g.arcs
    while q:
        a = q.popleft()
        for i in members[a]:
            for b in arcs[i]:
                if b in parent:
                    continue
                parent[b] = (a, i)
                if accept(b):
                    counts[b] += 1
                    while parent[b] is not None:
                        a2, i2 = parent[b]
                        assign[i2] = b
                        b = a2
                    counts[b] -= 1
                    return True
                q.append(b)
    return False


def feasible_flow(g: BinGraph) -> list[int] | None:
    """A bin per value node satisfying all count bounds, or None."""
    if any(l > h for l, h in zip(g.lo, g.hi)):
        return None
    counts = [0] * g.num_bins
    assign = []
    for arcs in g.arcs:
        if not arcs:
            return None
        j = next((b for b in arcs if counts[b] < g.hi[b]), arcs[0])
        assign.append(j)
        counts[j] += 1
    for a in range(g.num_bins):
        while counts[a] > g.hi[a]:
            if not _shift(g, assign, counts, [a], lambda b: counts[b] < g.hi[b]):
                return None
    for b in range(g.num_bins):
        while counts[b] < g.lo[b]:
            sources = [a for a in range(g.num_bins) if a != b and counts[a] > g.lo[a]]
            if not sources or not _shift(g, assign, counts, sources, lambda x, b=b: x == b):
                return None
    return assign


def _recount(g: BinGraph, assign: Sequence[int]) -> list[int]:
    counts = [0] * g.num_bins
    for j in assign:
        counts[j] += 1
    return counts


def count_range(g: BinGraph, assign: Sequence[int], j: int) -> tuple[int, int]:
    """Exact ``(min c_j, max c_j)`` starting from a feasible flow."""
    hi_assign = list(assign)
    counts = _recount(g, hi_assign)
    while counts[j] < g.hi[j]:
        sources = [a for a in range(g.num_bins) if a != j and counts[a] > g.lo[a]]
        if not sources or not _shift(g, hi_assign, counts, sources, lambda x: x == j):
            break
    c_max = counts[j]
    lo_assign = list(assign)
    counts = _recount(g, lo_assign)
    while counts[j] > g.lo[j]:
        if not _shift(g, lo_assign, counts, [j], lambda b: b != j and counts[b] < g.hi[b]):
            break
    return counts[j], c_max


def arc_status(g: BinGraph, assign: Sequence[int]) -> dict[tuple[int, int], tuple[int, int]]:
    """``(min f_ij, max f_ij)`` for every arc via residual-graph SCCs."""
    n, M = g.n, g.num_bins
    counts = _recount(g, assign)
    t = n + M
    adj: list[list[int]] = [[] for _ in range(t + 1)]
    for i, arcs in enumerate(g.arcs):
        for j in arcs:
            if assign[i] == j:
                adj[n + j].append(i)
            else:
                adj[i].append(n + j)
    for j in range(M):
        if counts[j] < g.hi[j]:
            adj[n + j].append(t)
        if counts[j] > g.lo[j]:
            adj[t].append(n + j)
    comp = strongly_connected(adj)
    out = {}
    for i, arcs in enumerate(g.arcs):
        for j in arcs:
            f = 1 if assign[i] == j else 0
            out[(i, j)] = (0, 1) if comp[i] == comp[n + j] else (f, f)
    return out


def strongly_connected(adj: list[list[int]]) -> list[int]:
    """Iterative Tarjan; returns a component id per node."""
    N = len(adj)
    index = [-1] * N
    low = [0] * N
    comp = [-1] * N
    on_stack = [False] * N
    stack: list[int] = []
    counter = 0
    ncomp = 0
    for root in range(N):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, k = work[-1]
            if k < len(adj[v]):
                work[-1] = (v, k + 1)
                w = adj[v][k]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
    return comp


# -- public queries -------------------------------------------------------

def feasible(g: BinGraph, fixed: Iterable[tuple[int, int, int]] = ()) -> bool:
    fixed = list(fixed)
    h = g.restricted(fixed) if fixed else g
    return feasible_flow(h) is not None


def count_bounds(g: BinGraph, j: int) -> tuple[int, int]:
    assign = feasible_flow(g)
    if assign is None:
        raise Inconsistent(f"bin {j}: flow system infeasible")
    return count_range(g, assign, j)


def arc_flow_bounds(g: BinGraph, i: int, j: int) -> tuple[int, int]:
    """Bounds of ``f_ij`` by two feasibility probes (independent of SCCs)."""
    can0 = feasible(g, [(i, j, 0)])
    can1 = feasible(g, [(i, j, 1)])
    if not (can0 or can1):
        raise Inconsistent(f"arc ({i}, {j}): flow system infeasible")
    return (0 if can0 else 1), (1 if can1 else 0)


def flow_bounds(g: BinGraph) -> FlowBounds:
    assign = feasible_flow(g)
    if assign is None:
        raise Inconsistent("flow system infeasible")
    counts = [count_range(g, assign, j) for j in range(g.bins.m)]
    return FlowBounds(counts, arc_status(g, assign))


def dump(g: BinGraph) -> str:
    """Line-oriented text rendering used for golden comparisons."""
    lines = [f"graph n={g.n} m={g.bins.m} hidden={int(g.hidden)} "
             f"bins={','.join(map(str, g.bins.boundaries))}"]
    for j in range(g.num_bins):
        name = "hidden" if j == g.bins.m else f"c{j + 1}"
        lines.append(f"bin {name} bounds=[{g.lo[j]},{g.hi[j]}]")
    for i, arcs in enumerate(g.arcs):
        for j in arcs:
            lab = ""
            if g.labels is not None:
                lab = " label={" + ",".join(map(str, g.labels[(i, j)])) + "}"
            name = "hidden" if j == g.bins.m else f"c{j + 1}"
            lines.append(f"arc x{i + 1} -> {name}{lab}")
    return "\n".join(lines)
