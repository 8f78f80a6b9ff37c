import itertools
from fractions import Fraction

import pytest

from bincp import constraints as C
from bincp.kernel import Solver, dfs_search
from bincp.stats import pearson_statistic


def all_solutions(s, goal):
    """Enumerate by repeated search with nogoods on the goal tuple (tiny stores only)."""
    found = set()
    for combo in itertools.product(*[s.values(v) for v in goal]):
        s.push()
        ok = True
        try:
            for v, a in zip(goal, combo):
                s.assign(v, a)
        except Exception:
            ok = False
        if ok:
            s.schedule_all()
            ok = s.propagate()
        if ok:
            res = dfs_search(s, goal)
            ok = res.found
        s.pop()
        if ok:
            found.add(combo)
    return found


def test_linear_relations():
    for rel, pred in [("=", lambda t: t == 4), ("<=", lambda t: t <= 4), ("<", lambda t: t < 4),
                      (">=", lambda t: t >= 4), (">", lambda t: t > 4)]:
        s = Solver()
        x, y = s.int_vars(2, 0, 3)
        C.post_linear(s, [(2, x), (-1, y)], rel, 4)
        expect = {(a, b) for a in range(4) for b in range(4) if pred(2 * a - b)}
        assert all_solutions(s, [x, y]) == expect, rel
    with pytest.raises(ValueError):
        C.post_linear(Solver(), [], "!=", 0)


def test_linear_bounds_filtering():
    s = Solver()
    x, y = s.int_vars(2, 0, 10)
    C.post_linear(s, [(1, x), (1, y)], "=", 3)
    assert s.propagate()
    assert s.max(x) == 3 and s.max(y) == 3


def test_gcc_counts():
    s = Solver()
    xs = [s.new_var([1, 2]) for _ in range(3)]
    cs = [s.int_var(0, 3), s.int_var(0, 3)]
    C.post_gcc(s, xs, [1, 2], cs)
    s.assign(xs[0], 1)
    s.assign(cs[0], 1)
    assert s.propagate()
    assert s.values(xs[1]) == [2] and s.values(xs[2]) == [2] and s.values(cs[1]) == [2]


def test_gcc_solutions_match_brute_force():
    s = Solver()
    xs = [s.new_var([0, 1, 2]) for _ in range(3)]
    cs = [s.new_var([0, 2]), s.int_var(0, 1)]
    C.post_gcc(s, xs, [0, 1], cs)
    expect = set()
    for t in itertools.product(range(3), repeat=3):
        if t.count(0) in (0, 2) and t.count(1) <= 1:
            expect.add(t)
    assert all_solutions(s, xs) == expect


@pytest.mark.parametrize("matching", [True, False])
def test_all_different(matching):
    s = Solver()
    xs = [s.new_var([1, 2]), s.new_var([1, 2]), s.new_var([1, 2, 3])]
    C.post_all_different(s, xs, matching)
    assert s.propagate()
    if matching:
        assert s.values(xs[2]) == [3]
    expect = {t for t in itertools.product([1, 2], [1, 2], [1, 2, 3]) if len(set(t)) == 3}
    assert all_solutions(s, xs) == expect


def test_all_different_pigeonhole_fails_at_root():
    s = Solver()
    xs = [s.new_var([1, 2]) for _ in range(3)]
    C.post_all_different(s, xs)
    assert not s.propagate()


def test_element_one_based():
    s = Solver()
    idx = s.int_var(0, 10)
    res = s.int_var(0, 100)
    C.post_element(s, res, [10, 20, 20, 30], idx)
    assert s.propagate()
    assert s.values(idx) == [1, 2, 3, 4] and s.values(res) == [10, 20, 30]
    s.set_max(res, 20)
    s.set_min(res, 15)
    assert s.propagate() and s.values(idx) == [2, 3]


def test_bin_packing_loads():
    s = Solver()
    items = [s.int_var(1, 2) for _ in range(3)]
    loads = [s.int_var(0, 10), s.int_var(0, 4)]
    C.post_bin_packing(s, items, [3, 4, 5], loads)
    expect = set()
    for t in itertools.product([1, 2], repeat=3):
        l1 = sum(w for w, b in zip([3, 4, 5], t) if b == 1)
        if l1 <= 10 and 12 - l1 <= 4:
            expect.add(t)
    assert all_solutions(s, items) == expect
    s.assign(items[0], 2)
    assert s.propagate()
    assert s.values(items[1]) == [1] and s.values(items[2]) == [1]
    assert s.values(loads[0]) == [9] and s.values(loads[1]) == [3]


def test_pearson_scaled_matches_rational():
    S, L = C.pearson_scaled([3, 5, 2], [2, 4, 4])
    assert Fraction(S, L) == pearson_statistic([3, 5, 2], [2, 4, 4])


def test_scaled_cap_margin():
    # threshold exactly representable: 1/2 with targets (2, 2)
    assert C.scaled_cap(0.5, [2, 2]) == 1
    assert C.scaled_cap(0.5 - 1e-15, [2, 2]) == 1  # inside the margin
    assert C.scaled_cap(0.49, [2, 2]) == 0


def test_chi2_threshold_solutions_match_brute_force():
    targets = [1, 2, 1]
    threshold = 1.0
    s = Solver()
    os_ = [s.int_var(0, 4) for _ in targets]
    C.post_chi2_threshold(s, os_, targets, threshold)
    expect = {t for t in itertools.product(range(5), repeat=3)
              if pearson_statistic(t, targets) <= threshold}
    assert all_solutions(s, os_) == expect


def test_chi2_bound_with_cap_variable():
    s = Solver()
    os_ = [s.new_var([0, 3]), s.int_var(0, 6), s.int_var(0, 6)]
    K = s.int_var(0, 30)
    C.post_max_chi2(s, [os_], [2, 2, 2], K)
    assert s.propagate()
    # best case: o1 in {0,3} costs at least 1 (scaled by L=2: (3-2)^2 = 1)
    assert s.min(K) == 1
    s.set_max(K, 1)
    assert s.propagate()
    assert s.values(os_[0]) == [3] and s.values(os_[1]) == [2] and s.values(os_[2]) == [2]


def test_chi2_rejects_bad_targets():
    with pytest.raises(ValueError):
        C.Chi2Bound([0], [0], cap=1)
    with pytest.raises(ValueError):
        C.post_chi2_threshold(Solver(), [], [], -1.0)
