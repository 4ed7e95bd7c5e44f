import numpy as np
import numpy.testing as npt
import pytest
from scipy import stats

from spherecov import TooFewPairsError
from spherecov.ranktests import (
    midranks,
    rank_sum,
    signed_rank,
    signed_rank_exact_cdf,
)

rng = np.random.default_rng(77)


def test_midranks_with_ties():
    npt.assert_array_equal(midranks([3, 1, 4, 1, 5]), [3.0, 1.5, 4.0, 1.5, 5.0])
    npt.assert_array_equal(midranks([2.0, 2.0, 2.0]), [2.0, 2.0, 2.0])
    npt.assert_array_equal(midranks([10.0]), [1.0])


def test_signed_rank_all_positive_small():
    res = signed_rank([0.3, 1.1, 0.7, 2.0, 0.5], min_pairs=1)
    assert res.statistic == 15.0
    assert res.n_effective == 5
    assert res.method == "exact"
    # only T=15 and T=0 are at least this extreme, two-sided
    assert res.p_value == pytest.approx(2.0 / 32.0, abs=1e-15)


def test_signed_rank_known_small_case():
    res = signed_rank([1.2, -0.5, 2.0], min_pairs=1)
    assert res.statistic == 5.0
    assert res.method == "exact"
    assert res.p_value == pytest.approx(0.5, abs=1e-15)


def test_signed_rank_sign_flip_symmetry():
    z = rng.normal(size=9)
    a = signed_rank(z, min_pairs=1)
    b = signed_rank(-z, min_pairs=1)
    n = 9
    assert a.statistic + b.statistic == pytest.approx(n * (n + 1) / 2.0)
    assert a.p_value == pytest.approx(b.p_value, abs=1e-12)


def test_signed_rank_drops_zeros():
    res = signed_rank([0.0, 0.0, 1.0, -2.0, 3.0, 0.0], min_pairs=1)
    assert res.n_effective == 3
    ref = signed_rank([1.0, -2.0, 3.0], min_pairs=1)
    assert res.statistic == ref.statistic
    assert res.p_value == ref.p_value


def test_signed_rank_too_few_pairs():
    with pytest.raises(TooFewPairsError):
        signed_rank([1.0, -1.0, 2.0, 0.0], min_pairs=5)
    with pytest.raises(TooFewPairsError):
        signed_rank([0.0, 0.0, 0.0], min_pairs=1)


def test_signed_rank_exact_matches_scipy():
    # untied data uses the exact null distribution
    for trial in range(200):
        n = int(rng.integers(5, 26))
        z = rng.normal(size=n)
        res = signed_rank(z, min_pairs=5)
        assert res.method == "exact"
        ref = stats.wilcoxon(z, mode="exact")
        assert res.p_value == pytest.approx(ref.pvalue, abs=0.0)


def test_signed_rank_normal_approx_matches_scipy():
    # beyond the exact-size cutoff the tie-corrected normal approximation is used
    checked = 0
    for trial in range(100):
        n = int(rng.integers(30, 60))
        z = np.round(rng.normal(size=n), 1)
        z = z[z != 0.0]
        if len(z) < 30:
            continue
        res = signed_rank(z, min_pairs=5)
        assert res.method == "normal_approx"
        ref = stats.wilcoxon(z, mode="approx", correction=True)
        assert res.p_value == pytest.approx(ref.pvalue, abs=1e-12)
        checked += 1
    assert checked > 50


def test_signed_rank_exact_handles_ties():
    # midrank ties stay exact at small sizes; sanity check against sign flips
    z = np.array([0.5, 0.5, -0.5, 1.0, 1.0, -2.0, 3.0])
    res = signed_rank(z, min_pairs=5)
    assert res.method == "exact"
    flip = signed_rank(-z, min_pairs=5)
    assert res.p_value == pytest.approx(flip.p_value, abs=1e-15)
    assert 0.0 < res.p_value <= 1.0


def test_signed_rank_exact_cdf_is_distribution():
    ranks = np.arange(1.0, 9.0)
    support, cdf = signed_rank_exact_cdf(ranks)
    npt.assert_array_equal(support, np.arange(0.0, 36.0 + 0.5, 0.5)[::1][: len(support)])
    assert cdf[-1] == pytest.approx(1.0, abs=1e-15)
    assert np.all(np.diff(cdf) >= 0.0)
    # symmetry of the null distribution around n(n+1)/4
    pmf = np.diff(np.concatenate([[0.0], cdf]))
    npt.assert_allclose(pmf, pmf[::-1], atol=1e-15)


def test_signed_rank_exact_cdf_support_spacing():
    # midranks can be half-integers, so the support uses steps of 1/2
    support, cdf = signed_rank_exact_cdf(np.array([1.5, 1.5, 3.0]))
    assert support[0] == 0.0
    assert support[-1] == pytest.approx(6.0)
    npt.assert_allclose(np.diff(support), 0.5)


def test_rank_sum_matches_scipy_asymptotic():
    for trial in range(100):
        nx = int(rng.integers(5, 30))
        ny = int(rng.integers(5, 30))
        if trial % 2 == 0:
            x = rng.normal(size=nx)
            y = rng.normal(loc=0.3, size=ny)
        else:
            # heavy ties
            x = rng.integers(0, 4, size=nx).astype(float)
            y = rng.integers(0, 4, size=ny).astype(float)
        res = rank_sum(x, y)
        ref = stats.mannwhitneyu(x, y, method="asymptotic", use_continuity=True)
        assert res.p_value == pytest.approx(ref.pvalue, abs=0.0)
        assert res.method == "normal_approx"


def test_rank_sum_statistic_complement():
    x = rng.normal(size=12)
    y = rng.normal(size=9)
    a = rank_sum(x, y)
    b = rank_sum(y, x)
    total = 21 * 22 / 2.0
    assert a.statistic + b.statistic == pytest.approx(total)
    assert a.p_value == pytest.approx(b.p_value, abs=1e-12)


def test_rank_sum_all_tied_gives_p_one():
    x = np.full(8, 2.0)
    y = np.full(10, 2.0)
    res = rank_sum(x, y)
    assert res.p_value == 1.0


def test_rank_sum_too_small():
    with pytest.raises(TooFewPairsError):
        rank_sum([1.0, 2.0], [3.0, 4.0, 5.0])
