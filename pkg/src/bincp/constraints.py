"""Supporting global and arithmetic constraints used by the application models."""
from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import Sequence

from .flow import strongly_connected
from .kernel import Inconsistent, Propagator, Solver

# Margin added to a real threshold before comparing an exact statistic with it.
THRESHOLD_MARGIN = Fraction(1, 10**12)


def _lcm(values: Sequence[int]) -> int:
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out


# -- linear ----------------------------------------------------------------

class Linear(Propagator):
    """``sum(a_i * x_i) <= bound`` or ``== bound`` with bounds propagation."""

    def __init__(self, terms: Sequence[tuple[int, int]], equality: bool, bound: int):
        self.coefs = [int(a) for a, _ in terms if a]
        self.vars = [v for a, v in terms if a]
        self.equality = equality
        self.bound = int(bound)

    def watch(self):
        return [True] * len(self.vars)

    def check(self, values):
        total = sum(a * v for a, v in zip(self.coefs, values))
        return total == self.bound if self.equality else total <= self.bound

    def propagate(self, s: Solver) -> None:
        coefs, vars_ = self.coefs, self.vars
        while True:
            lo = hi = 0
            for a, v in zip(coefs, vars_):
                if a > 0:
                    lo += a * s.min(v)
                    hi += a * s.max(v)
                else:
                    lo += a * s.max(v)
                    hi += a * s.min(v)
            if lo > self.bound or (self.equality and hi < self.bound):
                raise Inconsistent("linear")
            changed = False
            for a, v in zip(coefs, vars_):
                # upper side: a*x <= bound - (lo - own_min_contribution)
                if a > 0:
                    own_lo, own_hi = a * s.min(v), a * s.max(v)
                    slack = self.bound - (lo - own_lo)
                    changed |= s.set_max(v, slack // a)
                    if self.equality:
                        need = self.bound - (hi - own_hi)
                        changed |= s.set_min(v, -((-need) // a))
                else:
                    b = -a
                    own_lo, own_hi = a * s.max(v), a * s.min(v)
                    slack = self.bound - (lo - own_lo)
                    # -b*x <= slack  ->  x >= ceil(-slack / b)
                    changed |= s.set_min(v, -(slack // b))
                    if self.equality:
                        need = self.bound - (hi - own_hi)
                        # -b*x >= need -> x <= floor(-need / b)
                        changed |= s.set_max(v, (-need) // b)
            if not changed:
                return


def post_linear(s: Solver, terms: Sequence[tuple[int, int]], relation: str, bound: int) -> Linear:
    """Post ``sum(a * x for a, x in terms) <relation> bound``; relation in =, <=, <, >=, >."""
    terms = [(int(a), v) for a, v in terms]
    if relation == "=":
        return s.post(Linear(terms, True, bound))
    if relation == "<=":
        return s.post(Linear(terms, False, bound))
    if relation == "<":
        return s.post(Linear(terms, False, bound - 1))
    if relation == ">=":
        return s.post(Linear([(-a, v) for a, v in terms], False, -bound))
    if relation == ">":
        return s.post(Linear([(-a, v) for a, v in terms], False, -bound - 1))
    raise ValueError(f"unknown relation {relation!r}")


# -- global cardinality ----------------------------------------------------

class GlobalCardinality(Propagator):
    """Counting filter: ``o_k`` within [#fixed to k, #able to take k]; saturated
    or fully required values are pushed back onto the ``x`` variables."""

    def __init__(self, xs: Sequence[int], values: Sequence[int], counts: Sequence[int]):
        if len(set(values)) != len(values):
            raise ValueError("gcc values must be distinct")
        if len(values) != len(counts):
            raise ValueError("one count variable per value")
        self.xs = list(xs)
        self.vals = list(values)
        self.os = list(counts)
        self.vars = self.xs + self.os
        self._index = {v: k for k, v in enumerate(self.vals)}

    def watch(self):
        return [False] * len(self.xs) + [True] * len(self.os)

    def check(self, values):
        n = len(self.xs)
        xs, os = values[:n], values[n:]
        return all(xs.count(v) == o for v, o in zip(self.vals, os))

    def propagate(self, s: Solver) -> None:
        index = self._index
        K = len(self.vals)
        while True:
            fixed = [0] * K
            able: list[list[int]] = [[] for _ in range(K)]
            for x in self.xs:
                if s.is_fixed(x):
                    k = index.get(s.min(x))
                    if k is not None:
                        fixed[k] += 1
                        able[k].append(x)
                    continue
                for v in s.values(x):
                    k = index.get(v)
                    if k is not None:
                        able[k].append(x)
            changed = False
            for k, o in enumerate(self.os):
                changed |= s.set_min(o, fixed[k])
                changed |= s.set_max(o, len(able[k]))
                v = self.vals[k]
                if s.max(o) == fixed[k] and len(able[k]) > fixed[k]:
                    for x in able[k]:
                        if not s.is_fixed(x):
                            changed |= s.remove(x, v)
                elif s.min(o) == len(able[k]) and len(able[k]) > fixed[k]:
                    for x in able[k]:
                        changed |= s.assign(x, v)
            if not changed:
                return


def post_gcc(s: Solver, xs: Sequence[int], values: Sequence[int], counts: Sequence[int]):
    return s.post(GlobalCardinality(xs, values, counts))


# -- all different ---------------------------------------------------------

class AllDifferent(Propagator):
    """Matching-based filtering: keep value ``a`` for ``x`` iff some maximum
    matching uses it."""

    idempotent = True

    def __init__(self, xs: Sequence[int]):
        self.vars = list(xs)

    def check(self, values):
        return len(set(values)) == len(values)

    def propagate(self, s: Solver) -> None:
        xs = self.vars
        n = len(xs)
        doms = [s.values(x) for x in xs]
        match_val: dict[int, int] = {}
        match_var = [None] * n

        def augment(i: int, seen: set) -> bool:
            for a in doms[i]:
                if a in seen:
                    continue
                seen.add(a)
                j = match_val.get(a)
                if j is None or augment(j, seen):
                    match_val[a] = i
                    match_var[i] = a
                    return True
            return False

        for i in range(n):
            if not augment(i, set()):
                raise Inconsistent("all_different")
        # residual graph: var -> value (unmatched edges), value -> var (matched),
        # free value -> sink, sink -> matched value (alternating paths through free values)
        values = sorted({a for d in doms for a in d})
        vid = {a: n + k for k, a in enumerate(values)}
        sink = n + len(values)
        adj: list[list[int]] = [[] for _ in range(sink + 1)]
        for i in range(n):
            for a in doms[i]:
                if match_var[i] != a:
                    adj[i].append(vid[a])
                else:
                    adj[vid[a]].append(i)
        for a in values:
            if a in match_val:
                adj[sink].append(vid[a])
            else:
                adj[vid[a]].append(sink)
        comp = strongly_connected(adj)
        for i, x in enumerate(xs):
            for a in doms[i]:
                if match_var[i] != a and comp[i] != comp[vid[a]]:
                    s.remove(x, a)


class PairwiseDifferent(Propagator):
    """Fallback: remove fixed values from the other variables."""

    def __init__(self, xs: Sequence[int]):
        self.vars = list(xs)

    def check(self, values):
        return len(set(values)) == len(values)

    def propagate(self, s: Solver) -> None:
        for x in self.vars:
            if s.is_fixed(x):
                a = s.min(x)
                for y in self.vars:
                    if y != x:
                        s.remove(y, a)


def post_all_different(s: Solver, xs: Sequence[int], matching: bool = True):
    return s.post(AllDifferent(xs) if matching else PairwiseDifferent(xs))


# -- element ---------------------------------------------------------------

class Element(Propagator):
    """``result == table[index - base]`` with domain consistency on both sides."""

    idempotent = True

    def __init__(self, result: int, table: Sequence[int], index: int, base: int = 1):
        self.table = [int(t) for t in table]
        self.result = result
        self.index = index
        self.base = base
        self.vars = [index, result]

    def check(self, values):
        i, r = values
        k = i - self.base
        return 0 <= k < len(self.table) and self.table[k] == r

    def propagate(self, s: Solver) -> None:
        base, table = self.base, self.table
        s.keep_range(self.index, base, base + len(table))
        keep = [i for i in s.values(self.index) if s.contains(self.result, table[i - base])]
        s.restrict(self.index, keep)
        s.restrict(self.result, {table[i - base] for i in keep})


def post_element(s: Solver, result: int, table: Sequence[int], index: int, base: int = 1):
    return s.post(Element(result, table, index, base))


# -- bin packing -----------------------------------------------------------

class BinPacking(Propagator):
    """``load[j] == sum(w_i for s_i == j)`` with load-bound reasoning.

    Bins are numbered ``base .. base + len(loads) - 1``.
    """

    def __init__(self, items: Sequence[int], weights: Sequence[int], loads: Sequence[int], base: int = 1):
        if any(w < 0 for w in weights):
            raise ValueError("weights must be nonnegative")
        if len(items) != len(weights):
            raise ValueError("one weight per item")
        self.items = list(items)
        self.weights = [int(w) for w in weights]
        self.loads = list(loads)
        self.base = base
        self.total = sum(self.weights)
        self.vars = self.items + self.loads
        self._wmap = dict(zip(self.items, self.weights))

    def watch(self):
        return [False] * len(self.items) + [True] * len(self.loads)

    def check(self, values):
        k = len(self.items)
        got = [0] * len(self.loads)
        for b, w in zip(values[:k], self.weights):
            j = b - self.base
            if not 0 <= j < len(self.loads):
                return False
            got[j] += w
        return got == list(values[k:])

    def propagate(self, s: Solver) -> None:
        nb, base = len(self.loads), self.base
        for it in self.items:
            s.keep_range(it, base, base + nb)
        while True:
            req = [0] * nb
            pos = [0] * nb
            cand: list[list[int]] = [[] for _ in range(nb)]
            for it, w in zip(self.items, self.weights):
                if s.is_fixed(it):
                    req[s.min(it) - base] += w
                else:
                    for b in s.values(it):
                        pos[b - base] += w
                        cand[b - base].append(it)
            changed = False
            for j, l in enumerate(self.loads):
                changed |= s.set_min(l, req[j])
                changed |= s.set_max(l, req[j] + pos[j])
            lmin = [s.min(l) for l in self.loads]
            lmax = [s.max(l) for l in self.loads]
            smin, smax = sum(lmin), sum(lmax)
            if smin > self.total or smax < self.total:
                raise Inconsistent("bin_packing total")
            for j, l in enumerate(self.loads):
                changed |= s.set_min(l, self.total - (smax - lmax[j]))
                changed |= s.set_max(l, self.total - (smin - lmin[j]))
            wmap = self._wmap
            for j, l in enumerate(self.loads):
                hi, lo = s.max(l), s.min(l)
                for it in cand[j]:
                    w = wmap[it]
                    if req[j] + w > hi:
                        changed |= s.remove(it, j + base)
                    elif req[j] + pos[j] - w < lo:
                        changed |= s.assign(it, j + base)
            if not changed:
                return


def post_bin_packing(s: Solver, items: Sequence[int], weights: Sequence[int],
                     loads: Sequence[int], base: int = 1):
    return s.post(BinPacking(items, weights, loads, base))


# -- chi-square ------------------------------------------------------------

def pearson_scaled(counts: Sequence[int], targets: Sequence[int]) -> tuple[int, int]:
    """``(S, L)`` with ``S / L`` the Pearson statistic and ``L = lcm(targets)``."""
    L = _lcm(targets)
    S = sum((c - t) ** 2 * (L // t) for c, t in zip(counts, targets))
    return S, L


class Chi2Bound(Propagator):
    """``sum (o_k - t_k)^2 * (L / t_k) <= cap`` over integers, ``L = lcm(t)``.

    ``cap`` is either a constant or the upper bound of a variable (which is
    then also raised to the smallest achievable scaled statistic).
    """

    idempotent = True

    def __init__(self, counts: Sequence[int], targets: Sequence[int],
                 cap: int | None = None, cap_var: int | None = None):
        if any(t <= 0 for t in targets):
            raise ValueError("targets must be positive")
        if len(counts) != len(targets):
            raise ValueError("one target per count")
        if (cap is None) == (cap_var is None):
            raise ValueError("give exactly one of cap and cap_var")
        self.counts = list(counts)
        self.targets = [int(t) for t in targets]
        self.L = _lcm(self.targets)
        self.w = [self.L // t for t in self.targets]
        self.cap = cap
        self.cap_var = cap_var
        self.vars = self.counts + ([cap_var] if cap_var is not None else [])

    def watch(self):
        return [False] * len(self.counts) + ([True] if self.cap_var is not None else [])

    def check(self, values):
        k = len(self.counts)
        S, _ = pearson_scaled(values[:k], self.targets)
        cap = self.cap if self.cap_var is None else values[k]
        return S <= cap

    def _term_min(self, s: Solver, o: int, t: int, w: int) -> int:
        if s.contains(o, t):
            return 0
        lo, hi = s.min(o), s.max(o)
        if t < lo:
            return (lo - t) ** 2 * w
        if t > hi:
            return (t - hi) ** 2 * w
        below = max(v for v in s.values(o) if v < t)
        above = min(v for v in s.values(o) if v > t)
        return min(t - below, above - t) ** 2 * w

    def propagate(self, s: Solver) -> None:
        while True:
            mins = [self._term_min(s, o, t, w) for o, t, w in zip(self.counts, self.targets, self.w)]
            total = sum(mins)
            if self.cap_var is not None:
                s.set_min(self.cap_var, total)
                cap = s.max(self.cap_var)
            else:
                cap = self.cap
            if total > cap:
                raise Inconsistent("chi2")
            changed = False
            for o, t, w, mk in zip(self.counts, self.targets, self.w, mins):
                r = isqrt((cap - (total - mk)) // w)
                changed |= s.keep_range(o, t - r, t + r + 1)
            if not changed:
                return


def scaled_cap(threshold: float, targets: Sequence[int]) -> int:
    """Largest integer ``S`` with ``S / lcm(targets) <= threshold + margin``."""
    L = _lcm(targets)
    bound = (Fraction(threshold) + THRESHOLD_MARGIN) * L
    return bound.numerator // bound.denominator


def post_chi2_threshold(s: Solver, counts: Sequence[int], targets: Sequence[int], threshold: float):
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    return s.post(Chi2Bound(counts, targets, cap=scaled_cap(threshold, targets)))


def post_max_chi2(s: Solver, groups: Sequence[Sequence[int]], targets: Sequence[int], K: int):
    """Every group's scaled statistic is at most ``K`` (scaled by ``lcm(targets)``)."""
    return [s.post(Chi2Bound(g, targets, cap_var=K)) for g in groups]
