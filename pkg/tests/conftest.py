"""Brute-force oracles shared by the test modules.

None of these touch the propagators: they enumerate assignments and filter
them with plain Python counting.
"""
import itertools
import random

import pytest


def histogram(values, boundaries, hidden=False):
    counts = [0] * (len(boundaries) - 1)
    for v in values:
        for j in range(len(boundaries) - 1):
            if boundaries[j] <= v < boundaries[j + 1]:
                counts[j] += 1
                break
        else:
            if not hidden:
                return None
    return counts


def solutions(x_domains, c_domains, boundaries, hidden=False):
    """Every (x, c) tuple satisfying the counting relation."""
    out = []
    for xs in itertools.product(*x_domains):
        h = histogram(xs, boundaries, hidden)
        if h is not None and all(h[j] in c_domains[j] for j in range(len(h))):
            out.append(tuple(xs) + tuple(h))
    return out


def projection(x_domains, c_domains, boundaries, hidden=False):
    """Per-variable supported values, or None if the relation has no solution."""
    sols = solutions(x_domains, c_domains, boundaries, hidden)
    if not sols:
        return None
    k = len(x_domains) + len(c_domains)
    return [sorted({s[i] for s in sols}) for i in range(k)]


def random_store(rng: random.Random, max_n=6, max_m=4, max_dom=5, span=12, count_holes=False):
    """Random value domains with holes; count domains are intervals unless ``count_holes``."""
    n = rng.randint(1, max_n)
    m = rng.randint(1, max_m)
    cuts = sorted(rng.sample(range(0, span + 1), m + 1))
    x_domains = [sorted(rng.sample(range(-1, span + 2), rng.randint(1, max_dom))) for _ in range(n)]
    c_domains = []
    for _ in range(m):
        if count_holes:
            c_domains.append(sorted(rng.sample(range(0, n + 1), rng.randint(1, min(max_dom, n + 1)))))
        else:
            lo = rng.randint(0, n)
            c_domains.append(list(range(rng.randint(0, lo), lo + 1 + rng.randint(0, n - lo))))
    return x_domains, c_domains, cuts


@pytest.fixture
def rng():
    return random.Random(20240917)


EXAMPLE_X = [[3, 4], [1, 2, 4], [2, 3, 4]]
EXAMPLE_C = [[1, 2, 3], [0, 1]]
EXAMPLE_BINS = (1, 3, 5)
