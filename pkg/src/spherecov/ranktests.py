"""Wilcoxon signed-rank and rank-sum tests.

Both tests drop exact zeros, use midranks for ties, and report two-sided
p-values. The signed-rank null distribution is computed exactly (by the
subset-sum recursion over doubled ranks) up to 25 effective pairs and by a
tie-corrected normal approximation with continuity correction beyond that.
The rank-sum test always uses the normal approximation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .errors import TooFewPairsError

__all__ = [
    "EXACT_LIMIT",
    "RankTestResult",
    "midranks",
    "signed_rank",
    "signed_rank_exact_cdf",
    "rank_sum",
]

EXACT_LIMIT = 25


@dataclass(frozen=True)
class RankTestResult:
    statistic: float
    p_value: float
    n_effective: int
    method: str  # "exact" or "normal_approx"


def midranks(x) -> np.ndarray:
    """Ranks starting at 1, with tied values sharing their average rank."""
    x = np.asarray(x, dtype=float)
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x))
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and x[order[j + 1]] == x[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _tie_term(ranks: np.ndarray) -> float:
    """Sum of t^3 - t over tie groups (t = group size)."""
    _, counts = np.unique(ranks, return_counts=True)
    return float(np.sum(counts.astype(float) ** 3 - counts))


def _exact_t2_pmf(ranks: np.ndarray) -> np.ndarray:
    """Null pmf of 2T over doubled ranks (doubled midranks are integers)."""
    doubled = np.rint(2.0 * ranks).astype(int)
    total = int(doubled.sum())
    # counts[s] = number of sign patterns whose positive doubled-ranks sum to s
    counts = np.zeros(total + 1)
    counts[0] = 1.0
    for r in doubled:
        counts[r:] += counts[: total + 1 - r].copy()
    return counts / counts.sum()


def signed_rank_exact_cdf(ranks) -> tuple[np.ndarray, np.ndarray]:
    """Support (in statistic units) and exact null CDF of T for given ranks."""
    ranks = np.asarray(ranks, dtype=float)
    pmf = _exact_t2_pmf(ranks)
    support = np.arange(len(pmf)) / 2.0
    return support, np.cumsum(pmf)


def signed_rank(z, min_pairs: int = 5) -> RankTestResult:
    """Signed-rank test of median-zero differences.

    T is the sum of the |z| ranks at positions where z > 0, after dropping
    exact zeros. Two-sided p-value: exact when the effective sample size is
    at most 25, normal approximation with tie correction and continuity
    correction otherwise.

    Raises:
        TooFewPairsError: fewer than min_pairs nonzero differences.
    """
    z = np.asarray(z, dtype=float)
    z = z[z != 0.0]
    n = len(z)
    if n < min_pairs:
        raise TooFewPairsError(
            f"{n} nonzero differences, need at least {min_pairs}"
        )
    ranks = midranks(np.abs(z))
    t = float(ranks[z > 0.0].sum())
    if n <= EXACT_LIMIT:
        pmf = _exact_t2_pmf(ranks)
        t2 = int(round(2.0 * t))
        cdf = np.cumsum(pmf)
        p_le = float(cdf[t2])
        p_ge = float(pmf[t2:].sum())
        p = min(1.0, 2.0 * min(p_le, p_ge))
        return RankTestResult(t, p, n, "exact")
    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0 - _tie_term(ranks) / 48.0
    if var <= 0.0:
        return RankTestResult(t, 1.0, n, "normal_approx")
    zstat = max(abs(t - mean) - 0.5, 0.0) / np.sqrt(var)
    p = min(1.0, 2.0 * float(norm.sf(zstat)))
    return RankTestResult(t, p, n, "normal_approx")


def rank_sum(x, y, min_size: int = 5) -> RankTestResult:
    """Rank-sum test: W = sum of the ranks of x in the pooled sample.

    Two-sided p-value by the normal approximation with tie-corrected
    variance and continuity correction (used for every sample size).

    Raises:
        TooFewPairsError: either sample smaller than min_size.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    m, n = len(x), len(y)
    if m < min_size or n < min_size:
        raise TooFewPairsError(
            f"sample sizes ({m}, {n}), need at least {min_size} each"
        )
    big_n = m + n
    ranks = midranks(np.concatenate([x, y]))
    w = float(ranks[:m].sum())
    mean = m * (big_n + 1) / 2.0
    var = m * n / 12.0 * ((big_n + 1) - _tie_term(ranks) / (big_n * (big_n - 1)))
    if var <= 0.0:
        return RankTestResult(w, 1.0, m + n, "normal_approx")
    zstat = max(abs(w - mean) - 0.5, 0.0) / np.sqrt(var)
    p = min(1.0, 2.0 * float(norm.sf(zstat)))
    return RankTestResult(w, p, m + n, "normal_approx")
