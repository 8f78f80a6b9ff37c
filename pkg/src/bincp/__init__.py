"""Finite-domain constraint toolkit centred on the ``bin_counts`` constraint."""
from .bincounts import BinCountsSpec, bin_counts, post_bin_counts
from .flow import BinSpec
from .kernel import Inconsistent, IntDomain, SearchResult, SearchStats, Solver
from .stats import MultinomialSample, chi2_inverse_cdf, ci_solve, pearson_statistic, qh_interval

__all__ = [
    "BinCountsSpec", "BinSpec", "Inconsistent", "IntDomain", "MultinomialSample", "SearchResult",
    "SearchStats", "Solver", "bin_counts", "chi2_inverse_cdf", "ci_solve", "pearson_statistic",
    "post_bin_counts", "qh_interval",
]
