import itertools

import pytest

from bincp.constraints import post_linear
from bincp.kernel import Inconsistent, IntDomain, Propagator, Solver, StoredBool, dfs_search, mask_values


def test_domain_basics():
    d = IntDomain([5, 3, 9, 3])
    assert list(d) == [3, 5, 9]
    assert (d.inf, d.sup, len(d)) == (3, 9, 3)
    assert 5 in d and 4 not in d and -100 not in d
    assert IntDomain.interval(2, 4) == [2, 3, 4]
    assert not IntDomain.interval(3, 2)
    assert mask_values(-2, 0b1011) == [-2, -1, 1]


def test_negative_values_and_holes():
    s = Solver()
    x = s.new_var([-3, -1, 0, 4])
    s.remove(x, 0)
    assert s.values(x) == [-3, -1, 4]
    s.remove_range(x, -2, 5)
    assert s.values(x) == [-3]
    assert s.is_fixed(x) and s.value(x) == -3


def test_bound_updates():
    s = Solver()
    x = s.int_var(0, 9)
    s.set_min(x, 3)
    s.set_max(x, 6)
    assert (s.min(x), s.max(x)) == (3, 6)
    s.keep_range(x, 4, 6)
    assert s.values(x) == [4, 5]
    with pytest.raises(Inconsistent):
        s.set_min(x, 7)


def test_wipeout_raises():
    s = Solver()
    x = s.new_var([1, 2])
    s.remove(x, 1)
    with pytest.raises(Inconsistent):
        s.remove(x, 2)


def test_trail_restores_domains_and_cells():
    s = Solver()
    x = s.int_var(0, 5)
    b = StoredBool(s, True)
    before = s.snapshot()
    s.push()
    s.set_max(x, 2)
    b.set(False)
    s.push()
    s.assign(x, 1)
    assert s.values(x) == [1]
    s.pop()
    assert s.values(x) == [0, 1, 2] and not b.get()
    s.pop()
    assert s.snapshot() == before and b.get()


class CountingProp(Propagator):
    """x < y, counting its own calls."""

    def __init__(self, x, y):
        self.vars = [x, y]
        self.calls = 0

    def propagate(self, s):
        self.calls += 1
        x, y = self.vars
        s.set_max(x, s.max(y) - 1)
        s.set_min(y, s.min(x) + 1)


def test_fixpoint_chain():
    s = Solver()
    a, b, c = s.int_vars(3, 0, 2)
    s.post(CountingProp(a, b))
    s.post(CountingProp(b, c))
    assert s.propagate()
    assert [s.value(v) for v in (a, b, c)] == [0, 1, 2]


def test_failed_propagation_reports_false():
    s = Solver()
    a, b = s.int_vars(2, 0, 0)
    s.post(CountingProp(a, b))
    assert not s.propagate()


def test_search_min_value_first():
    s = Solver()
    x = s.new_var([1, 2])
    res = dfs_search(s, [x])
    assert res.status == "solution" and res.solution == [1]
    assert res.stats.nodes >= 1


def test_search_exhausts_and_restores():
    s = Solver()
    xs = s.int_vars(3, 0, 1)
    post_linear(s, [(1, v) for v in xs], "=", 4)
    before = s.snapshot()
    res = dfs_search(s, xs)
    assert res.status == "exhausted" and res.solution is None
    assert s.snapshot() == before


def test_search_enumeration_matches_brute_force():
    # count solutions of x + 2y - z = 3 by excluding each one found
    s = Solver()
    x, y, z = s.int_vars(3, 0, 4)
    post_linear(s, [(1, x), (2, y), (-1, z)], "=", 3)
    brute = {t for t in itertools.product(range(5), repeat=3) if t[0] + 2 * t[1] - t[2] == 3}
    res = dfs_search(s, [x, y, z], "lex")
    assert res.found and tuple(res.solution) in brute
    assert tuple(res.solution) == min(brute)


def test_mindom_picks_smallest_domain():
    s = Solver()
    a = s.int_var(0, 5)
    b = s.new_var([7, 9])
    res = dfs_search(s, [a, b], "mindom")
    assert res.solution == [0, 7]


def test_minimize_proves_optimum():
    s = Solver()
    x, y = s.int_vars(2, 0, 6)
    obj = s.int_var(0, 12)
    post_linear(s, [(1, x), (1, y)], ">=", 5)
    post_linear(s, [(1, x), (1, y), (-1, obj)], "=", 0)
    res = s.minimize(obj, [x, y])
    assert res.status == "optimal" and res.objective == 5


def test_time_limit_reports_timeout():
    s = Solver()
    xs = s.int_vars(12, 0, 9)
    post_linear(s, [(1, v) for v in xs], "=", 200)  # infeasible, but only at the leaves for lex search
    res = dfs_search(s, xs, "lex", time_limit=1e-6)
    assert res.status in ("timeout", "exhausted")
