import numpy as np
import numpy.testing as npt
import pytest
import scipy.linalg

from spherecov import (
    NotPositiveDefiniteError,
    assert_spd,
    h_lik,
    h_lnpr,
    h_trdif,
    h_trln2,
    is_spd,
    make_invariant,
    similar_eigvals,
    spd_exp,
    spd_inv_sqrt,
    spd_log,
)

rng = np.random.default_rng(31)


def rand_spd(scale=1.0):
    a = rng.normal(size=(2, 2))
    return scale * (a @ a.T) + 0.1 * np.eye(2)


def test_similar_eigvals_matches_generalized_eigh():
    for _ in range(100):
        x, y = rand_spd(), rand_spd()
        mine = np.sort(similar_eigvals(x, y))
        ref = np.sort(scipy.linalg.eigh(x, y, eigvals_only=True))
        npt.assert_allclose(mine, ref, rtol=1e-10)


def test_trdif_diagonal_value():
    x = np.diag([2.0, 3.0])
    y = np.eye(2)
    assert h_trdif(x, y) == pytest.approx(3.0, abs=1e-15)


def test_trdif_reference():
    x, y, z = rand_spd(), rand_spd(), rand_spd()
    direct = abs(np.trace(np.linalg.solve(z, x - y)))
    assert h_trdif(x, y, z) == pytest.approx(direct, rel=1e-12)


def test_trln2_scaled_identity():
    assert h_trln2(np.e * np.eye(2), np.eye(2)) == pytest.approx(np.sqrt(2.0), abs=1e-14)


def test_lik_known_value():
    # sum(sigma) - sum(ln sigma) - n at sigma = (2, 2)
    val = h_lik(np.diag([2.0, 2.0]), np.eye(2))
    assert val == pytest.approx(2.0 - np.log(4.0), abs=1e-14)
    assert val == pytest.approx(0.6137056388801094, abs=1e-15)


def test_self_distance_zero():
    for h in (h_trdif, h_trln2, h_lik, h_lnpr):
        x = rand_spd()
        assert abs(h(x, x)) < 1e-12


def test_lnpr_clamped_argument():
    # near-equal operators must not produce NaN from log of a value below 1
    x = np.eye(2)
    y = np.eye(2) * (1 + 1e-15)
    val = h_lnpr(x, y)
    assert np.isfinite(val) and val >= 0.0


def test_similarity_invariance():
    for _ in range(200):
        x, y, z = rand_spd(), rand_spd(), rand_spd()
        g = rng.normal(size=(2, 2))
        while abs(np.linalg.det(g)) < 0.1:
            g = rng.normal(size=(2, 2))
        gx, gy, gz = g @ x @ g.T, g @ y @ g.T, g @ z @ g.T
        assert h_trdif(x, y, z) == pytest.approx(h_trdif(gx, gy, gz), rel=1e-8, abs=1e-10)
        assert h_trln2(x, y) == pytest.approx(h_trln2(gx, gy), rel=1e-8, abs=1e-10)
        assert h_lik(x, y) == pytest.approx(h_lik(gx, gy), rel=1e-8, abs=1e-10)
        assert h_lnpr(x, y) == pytest.approx(h_lnpr(gx, gy), rel=1e-8, abs=1e-10)


def test_triangle_inequality_metric_like():
    slack = 1e-10
    for _ in range(1000):
        x, y, w = rand_spd(), rand_spd(), rand_spd()
        z = rand_spd()
        assert h_trdif(x, y, z) <= h_trdif(x, w, z) + h_trdif(w, y, z) + slack
        assert h_trln2(x, y) <= h_trln2(x, w) + h_trln2(w, y) + slack
        assert h_lnpr(x, y) <= h_lnpr(x, w) + h_lnpr(w, y) + slack


def test_lik_triangle_violation():
    x, y, z = np.eye(2), 2.0 * np.eye(2), 4.0 * np.eye(2)
    assert h_lik(x, z) > h_lik(x, y) + h_lik(y, z)


def test_lik_asymmetric():
    x, y = np.diag([2.0, 2.0]), np.eye(2)
    assert h_lik(x, y) != pytest.approx(h_lik(y, x), rel=1e-3)


def test_spd_log_exp_inverse():
    for _ in range(50):
        x = rand_spd()
        npt.assert_allclose(spd_exp(spd_log(x)), x, atol=1e-12)


def test_spd_inv_sqrt():
    x = rand_spd()
    s = spd_inv_sqrt(x)
    npt.assert_allclose(s @ x @ s, np.eye(2), atol=1e-12)


def test_assert_spd_raises():
    with pytest.raises(NotPositiveDefiniteError):
        assert_spd(np.diag([1.0, 0.0]))
    with pytest.raises(NotPositiveDefiniteError):
        assert_spd(np.diag([1.0, -2.0]))
    assert not is_spd(np.array([[1.0, 2.0], [0.0, 1.0]]))  # asymmetric
    assert is_spd(np.eye(2))


def test_make_invariant_dispatch():
    x, y = rand_spd(), rand_spd()
    assert make_invariant("trln2")(x, y) == pytest.approx(h_trln2(x, y))
    z = rand_spd()
    assert make_invariant("trdif", reference=z)(x, y) == pytest.approx(h_trdif(x, y, z))
    with pytest.raises(ValueError):
        make_invariant("nope")
    with pytest.raises(ValueError):
        make_invariant("lik", reference=z)
