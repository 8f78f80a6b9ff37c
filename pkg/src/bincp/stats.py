"""Chi-square numerics and simultaneous multinomial confidence intervals."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

_EPS = 1e-16
_MAX_ITER = 10_000


def gammainc_lower(a: float, x: float) -> float:
    """Regularized lower incomplete gamma ``P(a, x)``.

    Series below ``x < a + 1``, Lentz continued fraction for ``Q`` above.
    """
    if a <= 0:
        raise ValueError("a must be positive")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0:
        return 0.0
    if x < a + 1:
        return _series(a, x)
    return 1.0 - _contfrac(a, x)


def gammainc_upper(a: float, x: float) -> float:
    """Regularized upper incomplete gamma ``Q(a, x) = 1 - P(a, x)``."""
    if x < a + 1:
        return 1.0 - gammainc_lower(a, x)
    return _contfrac(a, x)


def _prefactor(a: float, x: float) -> float:
    return math.exp(a * math.log(x) - x - math.lgamma(a))


def _series(a: float, x: float) -> float:
    term = total = 1.0 / a
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * _prefactor(a, x)


def _contfrac(a: float, x: float) -> float:
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * _prefactor(a, x)


def chi2_cdf(df: int, x: float) -> float:
    if df < 1:
        raise ValueError("df must be >= 1")
    if x <= 0:
        return 0.0
    return gammainc_lower(df / 2.0, x / 2.0)


def chi2_sf(df: int, x: float) -> float:
    """Upper tail ``1 - chi2_cdf``, computed without cancellation."""
    if df < 1:
        raise ValueError("df must be >= 1")
    if x <= 0:
        return 1.0
    return gammainc_upper(df / 2.0, x / 2.0)


def chi2_pdf(df: int, x: float) -> float:
    if x <= 0:
        return 0.0
    k = df / 2.0
    return math.exp((k - 1) * math.log(x) - x / 2 - k * math.log(2.0) - math.lgamma(k))


def chi2_inverse_cdf(df: int, q: float, tol: float = 1e-13) -> float:
    """Quantile of the chi-square distribution with ``df`` degrees of freedom.

    Bracket grown geometrically around the Wilson-Hilferty median estimate,
    then bisection with Newton steps accepted only inside the bracket.
    Above the median the upper tail is matched instead (``1 - q`` is exact there).
    """
    if df < 1 or int(df) != df:
        raise ValueError("df must be a positive integer")
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie strictly between 0 and 1")
    if q <= 0.5:
        def excess(x):
            return chi2_cdf(df, x) - q
        scale = q
    else:
        def excess(x):
            return (1.0 - q) - chi2_sf(df, x)
        scale = 1.0 - q
    x = max(df * (1.0 - 2.0 / (9.0 * df)) ** 3, 1e-3)
    lo = hi = x
    while excess(hi) < 0:
        hi *= 2.0
    while excess(lo) > 0:
        lo /= 2.0
        if lo < 1e-300:
            return 0.0
    x = 0.5 * (lo + hi)
    for _ in range(500):
        f = excess(x)
        if abs(f) <= tol * scale or hi - lo <= 1e-15 * hi:
            break
        if f < 0:
            lo = x
        else:
            hi = x
        pdf = chi2_pdf(df, x)
        step = x - f / pdf if pdf > 0 else None
        x = step if step is not None and lo < step < hi else 0.5 * (lo + hi)
    return x


def pearson_statistic(counts: Sequence[int], targets: Sequence[int]) -> Fraction:
    """Exact ``sum((c - t)^2 / t)``; ``float()`` it for the real value."""
    if len(counts) != len(targets):
        raise ValueError("counts and targets differ in length")
    if any(t <= 0 for t in targets):
        raise ValueError("targets must be positive")
    return sum((Fraction((c - t) ** 2, t) for c, t in zip(counts, targets)), Fraction(0))


def qh_interval(N: int, c: int, k: int, alpha: float) -> tuple[float, float]:
    """Quesenberry-Hurst interval for one cell: roots in ``p`` of

    ``N (c/N - p)^2 = A p (1 - p)``, ``A = chi2_inverse_cdf(k - 1, 1 - alpha)``.
    """
    if N <= 0:
        raise ValueError("N must be positive")
    if not 0 <= c <= N:
        raise ValueError("need 0 <= c <= N")
    if k < 2:
        raise ValueError("need at least two categories")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    A = chi2_inverse_cdf(k - 1, 1.0 - alpha)
    p = c / N
    a = N + A
    b = 2 * N * p + A
    disc = b * b - 4 * a * N * p * p
    if disc < -1e-9 * b * b:
        raise ValueError(f"negative discriminant {disc}")
    root = math.sqrt(max(disc, 0.0))
    lo = (b - root) / (2 * a)
    hi = (b + root) / (2 * a)
    if c == 0:
        lo = 0.0
    if c == N:
        hi = 1.0
    return min(max(lo, 0.0), p), max(min(hi, 1.0), p)


@dataclass(frozen=True)
class MultinomialSample:
    counts: tuple[int, ...]
    observations: tuple[int, ...] | None = None

    def __post_init__(self):
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be nonnegative")
        if self.observations is not None:
            seen = Counter(self.observations)
            if any(not 1 <= o <= self.k for o in seen):
                raise ValueError(f"observations must be category indices 1..{self.k}")
            hist = tuple(seen.get(j, 0) for j in range(1, self.k + 1))
            if hist != tuple(self.counts):
                raise ValueError(f"observations histogram {hist} != counts {tuple(self.counts)}")

    @classmethod
    def from_observations(cls, observations: Sequence[int], k: int | None = None) -> "MultinomialSample":
        k = k if k is not None else max(observations)
        seen = Counter(observations)
        return cls(tuple(seen.get(j, 0) for j in range(1, k + 1)), tuple(observations))

    @property
    def k(self) -> int:
        return len(self.counts)

    @property
    def N(self) -> int:
        return sum(self.counts)


def ci_solve(sample: MultinomialSample, alpha: float) -> list[tuple[float, float]]:
    """Simultaneous intervals for every category.

    With observations, counts are re-derived by posting ``bin_counts`` with
    unit bins ``1..k+1`` over fixed observation variables.
    """
    from .bincounts import post_bin_counts
    from .kernel import Solver

    counts = list(sample.counts)
    if sample.observations is not None:
        s = Solver()
        xs = [s.new_var([o]) for o in sample.observations]
        cs = [s.int_var(0, len(xs)) for _ in range(sample.k)]
        post_bin_counts(s, xs, cs, range(1, sample.k + 2))
        if not s.propagate():
            raise ValueError("observations inconsistent with categories")
        counts = [s.value(c) for c in cs]
    N = sum(counts)
    return [qh_interval(N, c, sample.k, alpha) for c in counts]
