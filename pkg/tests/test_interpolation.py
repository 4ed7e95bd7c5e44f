import json
from pathlib import Path

import numpy as np
import numpy.testing as npt
import pytest

from spherecov import (
    CoincidentPointError,
    DimensionMismatchError,
    IterationLimitError,
    consistency_sweep,
    convexity_probe,
    default_observation_points,
    eval_H,
    fractional_anisotropy,
    grad_H,
    hessian_H,
    linear_interp,
    make_problem,
    mse,
    precompute,
    project_to_simplex,
    random_pmfs,
    rank_check,
    rotate_points,
    solve,
    sqroot_interp,
    uniform_sample,
    unit_point,
    unit_points,
)
from spherecov.io import load_problem

FIXTURE =Path(__file__).resolve().parents[1] / "src" / "spherecov" / "fixtures" / "bimodal_k6.json"


def _random_problem(seed, invariant, k=6, m=2):
    local = np.random.default_rng(seed)
    domain = uniform_sample(local, k)
    endpoints = random_pmfs(local, k, m)
    alpha = np.full(m, 1.0 / m)
    return make_problem(domain, endpoints, alpha, invariant)


def _admissible_problem(seed, invariant, k=6, m=2):
    # skip seeds whose random domain is kernel-deficient
    for s in range(seed, seed + 50):
        prob = _random_problem(s, invariant, k, m)
        if rank_check(prob)["admissible"]:
            return prob
    raise RuntimeError("no admissible seed found")


def test_make_problem_validation():
    local = np.random.default_rng(0)
    domain = uniform_sample(local, 5)
    endpoints = random_pmfs(local, 5, 2)
    alpha = np.array([0.4, 0.6])
    with pytest.raises(ValueError):
        make_problem(domain, endpoints, alpha, "frobenius")
    with pytest.raises(ValueError):
        make_problem(domain, endpoints, alpha, "trln2", weight="cubic")
    with pytest.raises(DimensionMismatchError):
        make_problem(domain, endpoints[:, :4], alpha, "trln2")
    with pytest.raises(DimensionMismatchError):
        make_problem(domain, endpoints, np.array([0.4, 0.3, 0.3]), "trln2")
    with pytest.raises(ValueError):
        make_problem(domain, endpoints, np.array([0.7, 0.7]), "trln2")
    # default weights depend on the invariant
    assert make_problem(domain, endpoints, alpha, "trdif").weight == "unit"
    assert make_problem(domain, endpoints, alpha, "lik").weight == "pihalf"


def test_pihalf_rejects_near_coincident_pairs():
    domain = unit_points([[0.0, 0.0, 1.0], [0.6, 0.0, 0.8], [0.0, 0.7, 0.7]])
    obs = np.vstack([domain[0] + np.array([0.0, 1e-10, 0.0]), [0.0, -0.6, 0.8]])
    endpoints = random_pmfs(np.random.default_rng(1), 3, 2)
    alpha = np.array([0.5, 0.5])
    with pytest.raises(CoincidentPointError):
        make_problem(domain, endpoints, alpha, "trln2", obs=unit_points(obs))
    # unit weight tolerates coincidence
    make_problem(domain, endpoints, alpha, "trdif", obs=unit_points(obs))


def test_antipodal_domain_is_inadmissible_for_pihalf():
    # the pihalf weight cannot distinguish a point from its antipode, so a
    # domain of antipodal pairs caps the kernel rank at k/2
    base = uniform_sample(np.random.default_rng(3), 3)
    domain = np.vstack([base, -base])
    endpoints = random_pmfs(np.random.default_rng(4), 6, 2)
    prob = make_problem(domain, endpoints, np.array([0.5, 0.5]), "trln2")
    kern = precompute(prob)
    for i in range(3):
        npt.assert_allclose(kern.B[:, i], kern.B[:, i + 3], atol=1e-12)
    report = rank_check(prob, kern)
    assert report["rank_B"] <= 3
    assert not report["admissible"]


def test_default_observation_points():
    domain = uniform_sample(np.random.default_rng(5), 6)
    obs = default_observation_points(domain)
    assert obs.shape == domain.shape
    npt.assert_allclose(np.linalg.norm(obs, axis=1), 1.0, atol=1e-12)
    # rotated copies stay clear of the domain points
    gaps = np.arccos(np.clip(obs @ domain.T, -1.0, 1.0))
    assert gaps.min() > 1e-3


def test_bundled_fixture_is_admissible():
    prob, solver = load_problem(FIXTURE)
    kern = precompute(prob)
    for inv in ("trdif", "trln2", "lik"):
        alt = make_problem(prob.domain, prob.endpoints, prob.alpha, inv,
                           obs=prob.obs)
        assert rank_check(alt)["admissible"], inv
    assert solver["restarts"] == 8


def test_gradient_matches_finite_differences():
    h = 1e-6
    for invariant in ("trdif", "trln2", "lik"):
        prob = _admissible_problem(11, invariant)
        kern = precompute(prob)
        f = project_to_simplex(random_pmfs(np.random.default_rng(12), prob.k, 1)[0])
        f = 0.9 * f + 0.1 / prob.k  # keep away from the boundary
        g = grad_H(f, prob, kern)
        for i in range(prob.k):
            e = np.zeros(prob.k)
            e[i] = h
            fd = (eval_H(f + e, prob, kern) - eval_H(f - e, prob, kern)) / (2 * h)
            assert g[i] == pytest.approx(fd, rel=1e-5, abs=1e-8), invariant


def test_multiplicative_form_matches_direct_formula():
    # the multiplicative direction is f_i times the trZ-normalized per-point
    # quadratic forms; check against a plain loop with scipy matrix functions
    from scipy.linalg import logm

    for invariant in ("trln2", "lik"):
        prob = _admissible_problem(21, invariant)
        kern = precompute(prob)
        f = random_pmfs(np.random.default_rng(22), prob.k, 1)[0]
        got = grad_H(f, prob, kern, form="multiplicative")
        expected = np.zeros(prob.k)
        n_s, n_j = kern.Ut.shape[0], kern.Ut.shape[1]
        for s in range(n_s):
            for j in range(n_j):
                u = kern.Ut[s, j]  # (k, 2)
                M = np.einsum("i,ia,ib->ab", f, u, u)
                core = logm(M).real if invariant == "trln2" else M - np.eye(2)
                num = np.einsum("ia,ab,ib->i", u, core, u)
                tz = kern.trZ[s, j]  # (k,) per domain point
                ratio = np.where(tz > 1e-300, num / np.where(tz > 1e-300, tz, 1.0), 0.0)
                expected += prob.alpha[s] * ratio
        expected *= f
        npt.assert_allclose(got, expected, rtol=1e-9, atol=1e-11)
    prob = _admissible_problem(21, "trdif")
    with pytest.raises(ValueError):
        grad_H(np.full(prob.k, 1.0 / prob.k), prob, precompute(prob), form="multiplicative")
    with pytest.raises(ValueError):
        grad_H(np.full(prob.k, 1.0 / prob.k), prob, precompute(prob), form="direct")


def test_hessians():
    prob = _admissible_problem(31, "trdif")
    kern = precompute(prob)
    H = hessian_H(None, prob, kern)
    npt.assert_allclose(H, 2.0 * kern.K @ kern.K.T, atol=1e-14)
    lik = _admissible_problem(31, "lik")
    lk = precompute(lik)
    f = np.full(lik.k, 1.0 / lik.k)
    Hl = hessian_H(f, lik, lk)
    npt.assert_allclose(Hl, Hl.T, atol=1e-12)
    assert np.linalg.eigvalsh(Hl).min() >= -1e-10
    # finite-difference cross-check of the analytic likelihood Hessian
    h = 1e-6
    for i in range(lik.k):
        e = np.zeros(lik.k)
        e[i] = h
        fd = (grad_H(f + e, lik, lk) - grad_H(f - e, lik, lk)) / (2 * h)
        npt.assert_allclose(Hl[:, i], fd, rtol=5e-4, atol=1e-6)
    with pytest.raises(ValueError):
        hessian_H(f, _admissible_problem(31, "trln2"))


def test_trdif_solution_is_linear_interpolant():
    # the trdif gradient vanishes exactly at the linear interpolant, so the
    # solver must return it whenever the kernel has full rank
    for seed in range(5):
        prob = _admissible_problem(100 + seed, "trdif")
        res = solve(prob)
        expected = linear_interp(prob.alpha, prob.endpoints)
        npt.assert_allclose(res.f_hat, expected, atol=1e-8)
        assert res.converged


def test_delta_alpha_recovers_endpoint():
    for invariant in ("trdif", "lik"):
        prob = _admissible_problem(41, invariant)
        res = solve(prob.with_alpha(np.array([1.0, 0.0])))
        npt.assert_allclose(res.f_hat, prob.endpoints[0], atol=1e-6)
        assert eval_H(prob.endpoints[0], prob.with_alpha(np.array([1.0, 0.0]))) == pytest.approx(0.0, abs=1e-18)


def test_solve_monotone_trace():
    prob = _admissible_problem(51, "lik")
    res = solve(prob, record_trace=True)
    objs = [row[1] for row in res.trace]
    assert all(b <= a + 1e-12 for a, b in zip(objs, objs[1:]))
    assert res.converged
    assert res.trace[0][0] == 1
    its = [row[0] for row in res.trace]
    assert its == sorted(its)


def test_multistart_bookkeeping():
    prob, solver = load_problem(FIXTURE)
    res = solve(prob, max_iter=solver["max_iter"], restarts=8, seed=11)
    assert res.restarts_used == 8
    assert len(res.restart_objectives) == 8
    finite = [o for o in res.restart_objectives if np.isfinite(o)]
    assert res.objective == pytest.approx(min(finite), abs=1e-12)
    with pytest.raises(ValueError):
        solve(prob, restarts=0)


def test_warm_start_prepended():
    prob = _admissible_problem(61, "lik")
    base = solve(prob)
    warm = solve(prob, f0=base.f_hat)
    assert warm.objective <= base.objective + 1e-10
    # the warm start adds one start on top of the defaults
    assert warm.restarts_used == base.restarts_used + 1


def test_threads_match_serial():
    prob, solver = load_problem(FIXTURE)
    serial = solve(prob, max_iter=solver["max_iter"], restarts=4, seed=11)
    threaded = solve(prob, max_iter=solver["max_iter"], restarts=4, seed=11, threads=2)
    npt.assert_array_equal(serial.f_hat, threaded.f_hat)
    assert serial.objective == threaded.objective
    npt.assert_array_equal(serial.restart_objectives, threaded.restart_objectives)


def test_iteration_cap_reports_not_raises():
    prob = _admissible_problem(71, "lik")
    res = solve(prob, max_iter=1, tol=1e-16, restarts=1)
    assert not res.converged
    assert res.iterations <= 1


def test_sqroot_two_endpoint_closed_form():
    local = np.random.default_rng(81)
    endpoints = random_pmfs(local, 6, 2)
    r1, r2 = np.sqrt(endpoints[0]), np.sqrt(endpoints[1])
    theta = np.arccos(np.clip(r1 @ r2, -1.0, 1.0))
    for t in (0.0, 0.25, 0.5, 0.9, 1.0):
        got = sqroot_interp(np.array([1.0 - t, t]), endpoints)
        p = (np.sin((1.0 - t) * theta) * r1 + np.sin(t * theta) * r2) / np.sin(theta) \
            if theta > 0 else r1
        npt.assert_allclose(got, p ** 2, atol=1e-10)
    # asymmetric weights need iteration beyond the chordal initialization
    with pytest.raises(IterationLimitError):
        sqroot_interp(np.array([0.25, 0.75]), endpoints, max_iter=1, tol=1e-15)


def test_sqroot_multiway_fixed_point():
    local = np.random.default_rng(82)
    endpoints = random_pmfs(local, 5, 3)
    alpha = np.array([0.2, 0.3, 0.5])
    f = sqroot_interp(alpha, endpoints)
    assert f.min() >= 0.0
    assert f.sum() == pytest.approx(1.0, abs=1e-12)
    # Karcher condition: weighted log sum vanishes at the mean on the sphere
    p = np.sqrt(f)
    resid = np.zeros_like(p)
    for a, ep in zip(alpha, np.sqrt(endpoints)):
        cos = np.clip(p @ ep, -1.0, 1.0)
        ang = np.arccos(cos)
        if ang > 1e-12:
            resid += a * ang * (ep - cos * p) / np.sin(ang)
    npt.assert_allclose(resid, 0.0, atol=1e-9)


def test_mse_identity():
    # the linear interpolant minimizes the alpha-weighted mean squared error
    local = np.random.default_rng(91)
    endpoints = random_pmfs(local, 7, 3)
    alpha = np.array([0.5, 0.2, 0.3])
    lin = linear_interp(alpha, endpoints)
    base = mse(lin, endpoints, alpha)
    for cand in random_pmfs(local, 7, 50):
        assert base <= mse(cand, endpoints, alpha) + 1e-15


def test_fractional_anisotropy_extremes():
    domain = uniform_sample(np.random.default_rng(101), 6)
    point_mass = np.zeros(6)
    point_mass[2] = 1.0
    assert fractional_anisotropy(point_mass, domain) == pytest.approx(1.0, abs=1e-9)
    octa = np.array([
        [1.0, 0, 0], [-1.0, 0, 0], [0, 1.0, 0], [0, -1.0, 0], [0, 0, 1.0], [0, 0, -1.0],
    ])
    uniform = np.full(6, 1.0 / 6.0)
    assert fractional_anisotropy(uniform, octa) == pytest.approx(0.0, abs=1e-12)
    # similarity invariance: rotating the domain leaves FA unchanged
    f = random_pmfs(np.random.default_rng(102), 6, 1)[0]
    fa0 = fractional_anisotropy(f, domain)
    rotated = rotate_points(domain, unit_point([0.2, 0.9, 0.4]), 1.3)
    assert fractional_anisotropy(f, rotated) == pytest.approx(fa0, abs=1e-12)


def test_consistency_sweep_shapes_and_warm_start():
    prob = _admissible_problem(111, "lik")
    path = [np.array([1.0 - t, t]) for t in np.linspace(0.0, 1.0, 5)]
    results, f_steps, obj_steps = consistency_sweep(prob, path)
    assert len(results) == 5
    assert len(f_steps) == 4
    assert len(obj_steps) == 4
    npt.assert_allclose(results[0].f_hat, prob.endpoints[0], atol=1e-6)
    npt.assert_allclose(results[-1].f_hat, prob.endpoints[1], atol=1e-6)
    # neighboring steps stay close (warm start keeps the path continuous)
    assert max(f_steps) < 0.5
    assert all(np.isfinite(obj_steps))


def test_convexity_certificates():
    trdif = _admissible_problem(121, "trdif")
    rep = convexity_probe(trdif, n_points=10, rng=np.random.default_rng(0))
    assert rep["convex_certificate"]
    lik = _admissible_problem(121, "lik")
    rep = convexity_probe(lik, n_points=30, rng=np.random.default_rng(0))
    assert rep["convex_certificate"]
    assert rep["min_hessian_eig"] >= -1e-8


def test_trln2_nonconvex_on_fixture():
    # the log-squared invariant admits negative curvature on the simplex
    prob, _ = load_problem(FIXTURE)
    rep = convexity_probe(prob, n_points=40, rng=np.random.default_rng(5))
    assert rep["min_hessian_eig"] < -1e-8
    assert not rep["convex_certificate"]


def test_eval_off_simplex():
    prob = _admissible_problem(131, "trdif")
    f = np.full(prob.k, 2.0 / prob.k)  # sums to 2, still evaluates
    val = eval_H(f, prob)
    assert np.isfinite(val)


def test_objective_nonnegative_and_zero_at_endpoints():
    for invariant in ("trdif", "trln2", "lik"):
        prob = _admissible_problem(141, invariant)
        f = random_pmfs(np.random.default_rng(142), prob.k, 1)[0]
        assert eval_H(f, prob) >= 0.0
        one_hot = prob.with_alpha(np.array([0.0, 1.0]))
        assert eval_H(prob.endpoints[1], one_hot) == pytest.approx(0.0, abs=1e-16)
