"""Minimal finite-domain CP engine.

Domains are Python ints used as bitsets relative to a per-variable offset, so
interval removal and membership are single bit operations. Every mutation is
recorded on a trail and undone by :meth:`Solver.pop`.
"""
from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence


class Inconsistent(Exception):
    """A domain was wiped out."""


class SearchTimeout(Exception):
    pass


class IntDomain:
    """Finite set of integers, possibly with holes."""

    __slots__ = ("offset", "mask")

    def __init__(self, values: Iterable[int] = ()):
        vals = sorted(set(int(v) for v in values))
        self.offset = vals[0] if vals else 0
        mask = 0
        for v in vals:
            mask |= 1 << (v - self.offset)
        self.mask = mask

    @classmethod
    def interval(cls, lo: int, hi: int) -> "IntDomain":
        """Inclusive range ``lo..hi``."""
        d = cls()
        if hi >= lo:
            d.offset = lo
            d.mask = (1 << (hi - lo + 1)) - 1
        return d

    @classmethod
    def from_mask(cls, offset: int, mask: int) -> "IntDomain":
        d = cls()
        d.offset, d.mask = offset, mask
        return d

    @property
    def inf(self) -> int:
        if not self.mask:
            raise ValueError("empty domain has no inf")
        return self.offset + (self.mask & -self.mask).bit_length() - 1

    @property
    def sup(self) -> int:
        if not self.mask:
            raise ValueError("empty domain has no sup")
        return self.offset + self.mask.bit_length() - 1

    def __contains__(self, v: int) -> bool:
        k = v - self.offset
        return k >= 0 and (self.mask >> k) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        return iter(mask_values(self.offset, self.mask))

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __bool__(self) -> bool:
        return self.mask != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, IntDomain):
            return list(self) == list(other)
        try:
            return list(self) == sorted(set(other))
        except TypeError:
            return NotImplemented

    def __repr__(self) -> str:
        return "{" + ",".join(map(str, self)) + "}"


def mask_values(offset: int, mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(offset + low.bit_length() - 1)
        mask ^= low
    return out


def popcount(x: int) -> int:
    return bin(x).count("1")


class Propagator:
    """Base class. Subclasses set ``vars`` and implement :meth:`propagate`.

    ``idempotent`` propagators are not rescheduled by their own modifications.
    ``watch`` returns, per local variable, whether the propagator wakes on
    bound changes only (True) or on any domain change (False).
    """

    idempotent = False
    vars: Sequence[int] = ()

    def watch(self) -> Sequence[bool]:
        return [False] * len(self.vars)

    def notify(self, local: int) -> None:
        pass

    def discard(self) -> None:
        pass

    def propagate(self, s: "Solver") -> None:
        raise NotImplementedError

    def check(self, values: Sequence[int]) -> bool:
        """Definition check on a complete assignment of ``vars``."""
        raise NotImplementedError


class Solver:
    def __init__(self):
        self.offsets: list[int] = []
        self.masks: list[int] = []
        self.names: list[str] = []
        self.propagators: list[Propagator] = []
        self._subs: list[list[tuple[Propagator, int, bool]]] = []
        self._trail: list[tuple[int, int]] = []
        self._marks: list[int] = []
        self._cells: list = []
        self._queue: deque[Propagator] = deque()
        self._queued: set[int] = set()
        self._current: Propagator | None = None

    # -- variables -------------------------------------------------------

    def new_var(self, domain: IntDomain | Iterable[int], name: str | None = None) -> int:
        if not isinstance(domain, IntDomain):
            domain = IntDomain(domain)
        if not domain:
            raise ValueError("empty initial domain")
        v = len(self.masks)
        self.offsets.append(domain.offset)
        self.masks.append(domain.mask)
        self.names.append(name or f"v{v}")
        self._subs.append([])
        return v

    def int_var(self, lo: int, hi: int, name: str | None = None) -> int:
        return self.new_var(IntDomain.interval(lo, hi), name)

    def int_vars(self, n: int, lo: int, hi: int, prefix: str = "v") -> list[int]:
        return [self.int_var(lo, hi, f"{prefix}{i}") for i in range(n)]

    @property
    def num_vars(self) -> int:
        return len(self.masks)

    def domain(self, v: int) -> IntDomain:
        return IntDomain.from_mask(self.offsets[v], self.masks[v])

    def values(self, v: int) -> list[int]:
        return mask_values(self.offsets[v], self.masks[v])

    def min(self, v: int) -> int:
        m = self.masks[v]
        return self.offsets[v] + (m & -m).bit_length() - 1

    def max(self, v: int) -> int:
        return self.offsets[v] + self.masks[v].bit_length() - 1

    def size(self, v: int) -> int:
        return bin(self.masks[v]).count("1")

    def is_fixed(self, v: int) -> bool:
        m = self.masks[v]
        return m & (m - 1) == 0

    def value(self, v: int) -> int:
        if not self.is_fixed(v):
            raise ValueError(f"{self.names[v]} is not fixed")
        return self.min(v)

    def contains(self, v: int, a: int) -> bool:
        k = a - self.offsets[v]
        return k >= 0 and (self.masks[v] >> k) & 1 == 1

    def range_mask(self, v: int, lo: int, hi: int) -> int:
        """Mask of the half-open range [lo, hi) in ``v``'s coordinates."""
        off = self.offsets[v]
        lo -= off
        hi -= off
        if lo < 0:
            lo = 0
        top = self.masks[v].bit_length()
        if hi > top:
            hi = top
        if hi <= lo:
            return 0
        return ((1 << (hi - lo)) - 1) << lo

    def intersects(self, v: int, lo: int, hi: int) -> bool:
        return self.masks[v] & self.range_mask(v, lo, hi) != 0

    # -- modification ----------------------------------------------------

    def _update(self, v: int, new: int) -> bool:
        old = self.masks[v]
        if new == old:
            return False
        if new == 0:
            raise Inconsistent(self.names[v])
        self._trail.append((v, old))
        self.masks[v] = new
        bounds = (old & -old) != (new & -new) or old.bit_length() != new.bit_length()
        cur = self._current
        for prop, local, bounds_only in self._subs[v]:
            if bounds_only and not bounds:
                continue
            if prop is cur and prop.idempotent:
                continue
            prop.notify(local)
            pid = id(prop)
            if pid not in self._queued:
                self._queued.add(pid)
                self._queue.append(prop)
        return True

    def remove(self, v: int, a: int) -> bool:
        k = a - self.offsets[v]
        if k < 0:
            return False
        return self._update(v, self.masks[v] & ~(1 << k))

    def remove_range(self, v: int, lo: int, hi: int) -> bool:
        """Remove the half-open range [lo, hi)."""
        rm = self.range_mask(v, lo, hi)
        if not rm:
            return False
        return self._update(v, self.masks[v] & ~rm)

    def keep_range(self, v: int, lo: int, hi: int) -> bool:
        """Keep only the half-open range [lo, hi)."""
        return self._update(v, self.masks[v] & self.range_mask(v, lo, hi))

    def set_min(self, v: int, a: int) -> bool:
        k = a - self.offsets[v]
        if k <= 0:
            return False
        return self._update(v, (self.masks[v] >> k) << k)

    def set_max(self, v: int, a: int) -> bool:
        k = a - self.offsets[v]
        if k < 0:
            raise Inconsistent(self.names[v])
        return self._update(v, self.masks[v] & ((1 << (k + 1)) - 1))

    def assign(self, v: int, a: int) -> bool:
        k = a - self.offsets[v]
        if k < 0:
            raise Inconsistent(self.names[v])
        return self._update(v, self.masks[v] & (1 << k))

    def restrict(self, v: int, allowed: Iterable[int]) -> bool:
        off = self.offsets[v]
        keep = 0
        for a in allowed:
            if a >= off:
                keep |= 1 << (a - off)
        return self._update(v, self.masks[v] & keep)

    # -- trailed cells ---------------------------------------------------

    def new_cell(self, value) -> int:
        self._cells.append(value)
        return len(self._cells) - 1

    def cell(self, c: int):
        return self._cells[c]

    def set_cell(self, c: int, value) -> None:
        if self._cells[c] != value:
            self._trail.append((-1 - c, self._cells[c]))
            self._cells[c] = value

    # -- levels ----------------------------------------------------------

    @property
    def level(self) -> int:
        return len(self._marks)

    def push(self) -> None:
        self._marks.append(len(self._trail))

    def pop(self) -> None:
        mark = self._marks.pop()
        trail = self._trail
        masks, cells = self.masks, self._cells
        while len(trail) > mark:
            k, old = trail.pop()
            if k >= 0:
                masks[k] = old
            else:
                cells[-1 - k] = old

    # -- propagation -----------------------------------------------------

    def post(self, prop: Propagator) -> Propagator:
        self.propagators.append(prop)
        for local, (v, bounds_only) in enumerate(zip(prop.vars, prop.watch())):
            self._subs[v].append((prop, local, bounds_only))
        self._queued.add(id(prop))
        self._queue.append(prop)
        return prop

    def fixpoint(self) -> None:
        """Run queued propagators until quiescence; raises Inconsistent."""
        queue = self._queue
        try:
            while queue:
                prop = queue.popleft()
                self._queued.discard(id(prop))
                self._current = prop
                prop.propagate(self)
        except Inconsistent:
            for prop in queue:
                prop.discard()
            if self._current is not None:
                self._current.discard()
            queue.clear()
            self._queued.clear()
            raise
        finally:
            self._current = None

    def propagate(self) -> bool:
        """Propagate to fixpoint. Returns False on failure."""
        try:
            self.fixpoint()
        except Inconsistent:
            return False
        return True

    def schedule_all(self) -> None:
        for prop in self.propagators:
            if id(prop) not in self._queued:
                self._queued.add(id(prop))
                self._queue.append(prop)

    def snapshot(self) -> list[tuple[int, int]]:
        return list(zip(self.offsets, self.masks))

    def check_assignment(self, values: Sequence[int]) -> bool:
        """Check every posted constraint against a complete assignment."""
        return all(p.check([values[v] for v in p.vars]) for p in self.propagators)

    # -- search ----------------------------------------------------------

    def solve(self, goal: Sequence[int] | None = None, strategy: str = "mindom",
              time_limit: float | None = None, complete: bool = True,
              stats: "SearchStats | None" = None) -> "SearchResult":
        return dfs_search(self, goal, strategy, time_limit, complete, stats)

    def minimize(self, objective: int, goal: Sequence[int] | None = None,
                 strategy: str = "mindom", time_limit: float | None = None) -> "SearchResult":
        return minimize(self, objective, goal, strategy, time_limit)


class StoredBool:
    """Boolean whose writes are undone on backtrack."""

    __slots__ = ("solver", "cell")

    def __init__(self, solver: Solver, value: bool = True):
        self.solver = solver
        self.cell = solver.new_cell(bool(value))

    def get(self) -> bool:
        return self.solver._cells[self.cell]

    def set(self, value: bool) -> None:
        self.solver.set_cell(self.cell, bool(value))

    def __bool__(self) -> bool:
        return self.get()


@dataclass
class SearchStats:
    nodes: int = 0
    failures: int = 0
    solutions: int = 0
    time_s: float = 0.0


@dataclass
class SearchResult:
    status: str  # "solution" | "exhausted" | "timeout" | "optimal" | "infeasible"
    solution: list[int] | None = None
    stats: SearchStats = field(default_factory=SearchStats)
    objective: int | None = None

    @property
    def found(self) -> bool:
        return self.solution is not None


STRATEGIES = ("mindom", "lex")


def _select(s: Solver, goal: Sequence[int], strategy: str) -> int:
    masks = s.masks
    if strategy == "lex":
        for v in goal:
            m = masks[v]
            if m & (m - 1):
                return v
        return -1
    best, best_size = -1, 1 << 60
    for v in goal:
        m = masks[v]
        if m & (m - 1):
            sz = bin(m).count("1")
            if sz < best_size:
                best, best_size = v, sz
                if sz == 2:
                    break
    return best


def dfs_search(s: Solver, goal: Sequence[int] | None = None, strategy: str = "mindom",
               time_limit: float | None = None, complete: bool = True,
               stats: SearchStats | None = None) -> SearchResult:
    """Depth-first search with binary branching ``x = min`` / ``x != min``.

    Each explored branch counts as a node. With ``complete`` the remaining
    variables are labelled in index order once the goal is fixed, so the
    returned assignment covers every variable. The solver state is restored
    before returning.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    stats = stats if stats is not None else SearchStats()
    goal = list(range(s.num_vars)) if goal is None else list(goal)
    in_goal = set(goal)
    rest = [v for v in range(s.num_vars) if v not in in_goal] if complete else []
    start = time.perf_counter()
    deadline = None if time_limit is None else start + time_limit
    base = s.level
    s.push()
    s.schedule_all()
    result = SearchResult("exhausted", stats=stats)
    stack: list[tuple[int, int]] = []
    try:
        ok = s.propagate()
        while True:
            if ok:
                v = _select(s, goal, strategy)
                if v < 0 and rest:
                    v = _select(s, rest, "lex")
                if v < 0:
                    stats.solutions += 1
                    result.status = "solution"
                    result.solution = [s.min(u) for u in range(s.num_vars)]
                    break
                if deadline is not None and time.perf_counter() > deadline:
                    raise SearchTimeout
                a = s.min(v)
                s.push()
                stack.append((v, a))
                stats.nodes += 1
                try:
                    s.assign(v, a)
                    s.fixpoint()
                except Inconsistent:
                    stats.failures += 1
                    ok = False
                continue
            # backtrack: take the right branch of the deepest open decision
            if not stack:
                break
            v, a = stack.pop()
            s.pop()
            stats.nodes += 1
            try:
                s.remove(v, a)
                s.fixpoint()
                ok = True
            except Inconsistent:
                stats.failures += 1
                ok = False
    except SearchTimeout:
        result.status = "timeout"
    finally:
        while s.level > base:
            s.pop()
        stats.time_s += time.perf_counter() - start
    return result


def minimize(s: Solver, objective: int, goal: Sequence[int] | None = None,
             strategy: str = "mindom", time_limit: float | None = None) -> SearchResult:
    """Branch and bound: solve, post ``objective < incumbent`` at the root, repeat."""
    stats = SearchStats()
    start = time.perf_counter()
    best: SearchResult | None = None
    while True:
        remaining = None
        if time_limit is not None:
            remaining = time_limit - (time.perf_counter() - start)
            if remaining <= 0:
                return _timeout(best, stats)
        res = dfs_search(s, goal, strategy, remaining, True, stats)
        if res.status == "timeout":
            return _timeout(best, stats)
        if res.solution is None:
            break
        best = res
        best.objective = res.solution[objective]
        try:
            s.set_max(objective, best.objective - 1)
        except Inconsistent:
            break
    if best is None:
        return SearchResult("infeasible", stats=stats)
    return SearchResult("optimal", best.solution, stats, best.objective)


def _timeout(best: SearchResult | None, stats: SearchStats) -> SearchResult:
    if best is None:
        return SearchResult("timeout", stats=stats)
    return SearchResult("timeout", best.solution, stats, best.objective)
