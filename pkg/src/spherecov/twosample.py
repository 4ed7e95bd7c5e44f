"""Two-sample location tests driven by covariance-operator projections.

At an observation point q, each sample point contributes the rank-1 point
operator of its log image. The difference of the two sample mean operators
is eigendecomposed, and the per-point quadratic forms (xi projections) along
its eigenvectors feed paired signed-rank tests (procedure 1) or unpaired
rank-sum tests (procedure 2). Squared geodesic distances give the baseline
T_d / W_d statistics those projections are compared against.

Rejection rule: the test along each eigenvector yields a two-sided p-value;
the null is rejected when the smaller one is below alpha/2 (union test over
the two directions with a Bonferroni-corrected threshold).
"""

from __future__ import annotations

from dataclasses import dataclass

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import SampleSizeMismatchError, TooFewPairsError
from .geometry import TangentFrame, TangentVec, log_map_coords, tangent_frame, unit_point, unit_points
from .ranktests import RankTestResult, rank_sum, signed_rank

__all__ = [
    "ProjectionData",
    "ProcedureOutcome",
    "ScanRow",
    "SampleProfile",
    "projections_at",
    "test_procedure_1",
    "test_procedure_2",
    "observation_scan",
    "det_sign_areas",
    "sample_profile",
    "operator_profile",
]


def _signed_eigh(lhat: np.ndarray):
    """Descending eigenvalues and sign-fixed eigenvectors of a symmetric 2x2.

    Sign convention: the first coordinate of each eigenvector that is not
    (numerically) zero is made positive, so reported eigenvectors are
    reproducible across runs and platforms.
    """
    w, v = np.linalg.eigh(lhat)
    w = w[::-1]
    v = v[:, ::-1]
    for s in range(2):
        col = v[:, s]
        lead = col[0] if abs(col[0]) > 1e-15 else col[1]
        if lead < 0.0:
            v[:, s] = -col
    return w, v


@dataclass(frozen=True, eq=False)
class ProjectionData:
    """Projections of two samples at one observation point."""

    frame: TangentFrame
    lhat: np.ndarray      # 2x2 difference of sample mean operators
    eigvals: np.ndarray   # descending (lambda_1 >= lambda_2)
    eigvecs: np.ndarray   # columns are the matching eigenvectors
    xi1: np.ndarray       # (m1, 2) projections of sample 1, column s along v_s
    xi2: np.ndarray       # (m2, 2)
    dsq1: np.ndarray      # (m1,) squared geodesic distances to q
    dsq2: np.ndarray      # (m2,)

    def eigvec(self, s: int) -> TangentVec:
        return TangentVec(frame=self.frame, u=self.eigvecs[:, s].copy())


def projections_at(q, sample1, sample2, frame: TangentFrame | None = None) -> ProjectionData:
    """Eigensystem of the sample-mean-operator difference and xi projections.

    For any i and l the projections satisfy xi_{i,1} + xi_{i,2} = d_i^2, and
    the per-eigenvector means satisfy mean(xi_s^1) - mean(xi_s^2) = lambda_s
    (for equal sample sizes).
    """
    q = unit_point(q)
    if frame is None:
        frame = tangent_frame(q)
    s1 = unit_points(sample1)
    s2 = unit_points(sample2)
    u1, d1 = log_map_coords(q, s1, frame)
    u2, d2 = log_map_coords(q, s2, frame)
    lhat = (u1.T @ u1) / len(u1) - (u2.T @ u2) / len(u2)
    w, v = _signed_eigh(lhat)
    return ProjectionData(
        frame=frame,
        lhat=lhat,
        eigvals=w,
        eigvecs=v,
        xi1=(u1 @ v) ** 2,
        xi2=(u2 @ v) ** 2,
        dsq1=d1 ** 2,
        dsq2=d2 ** 2,
    )


@dataclass(frozen=True, eq=False)
class ProcedureOutcome:
    """Result of one test procedure at one observation point."""

    kind: str                     # "signed_rank" or "rank_sum"
    stat_xi: float                # max of the two per-eigenvector statistics
    components: tuple             # RankTestResult per eigenvector
    d_test: RankTestResult        # the squared-distance baseline test
    eigvals: np.ndarray
    projections: ProjectionData
    alpha: float

    @property
    def min_p(self) -> float:
        return min(r.p_value for r in self.components)

    @property
    def reject(self) -> bool:
        return self.min_p < self.alpha / 2.0


def test_procedure_1(sample1, sample2, q, alpha: float = 0.05,
                     frame: TangentFrame | None = None, min_pairs: int = 5) -> ProcedureOutcome:
    """Paired signed-rank procedure on xi projections at q.

    Requires equal sample sizes (the i-th points form a pair). Also runs the
    signed-rank test on paired squared-distance differences for comparison.

    Raises:
        SampleSizeMismatchError: samples of different sizes.
        TooFewPairsError: all paired differences vanish (degenerate input).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    if len(sample1) != len(sample2):
        raise SampleSizeMismatchError(
            f"paired procedure needs equal sizes, got {len(sample1)} and {len(sample2)}"
        )
    proj = projections_at(q, sample1, sample2, frame)
    comps = tuple(
        signed_rank(proj.xi1[:, s] - proj.xi2[:, s], min_pairs=min_pairs)
        for s in range(2)
    )
    d_test = signed_rank(proj.dsq1 - proj.dsq2, min_pairs=min_pairs)
    return ProcedureOutcome(
        kind="signed_rank",
        stat_xi=max(c.statistic for c in comps),
        components=comps,
        d_test=d_test,
        eigvals=proj.eigvals,
        projections=proj,
        alpha=alpha,
    )


def test_procedure_2(sample1, sample2, q, alpha: float = 0.05,
                     frame: TangentFrame | None = None, min_size: int = 5) -> ProcedureOutcome:
    """Unpaired rank-sum procedure on xi projections at q.

    Same pipeline as the paired procedure with rank-sum tests per
    eigenvector; sample sizes may differ.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    proj = projections_at(q, sample1, sample2, frame)
    comps = tuple(
        rank_sum(proj.xi1[:, s], proj.xi2[:, s], min_size=min_size) for s in range(2)
    )
    d_test = rank_sum(proj.dsq1, proj.dsq2, min_size=min_size)
    return ProcedureOutcome(
        kind="rank_sum",
        stat_xi=max(c.statistic for c in comps),
        components=comps,
        d_test=d_test,
        eigvals=proj.eigvals,
        projections=proj,
        alpha=alpha,
    )


@dataclass(frozen=True, eq=False)
class ScanRow:
    """Criteria and test outcomes at one candidate observation point."""

    q: np.ndarray
    tr2: float
    det: float
    eigvals: np.ndarray
    paired: ProcedureOutcome | None
    unpaired: ProcedureOutcome | None
    error: str | None


def _scan_one(q, sample1, sample2, alpha) -> ScanRow:
    proj = projections_at(q, sample1, sample2)
    tr = float(np.trace(proj.lhat))
    det = float(np.linalg.det(proj.lhat))
    paired = unpaired = None
    errors = []
    # Degenerate candidates (for instance identical samples) keep their
    # criterion columns; the affected test outcomes stay empty.
    if len(sample1) == len(sample2):
        try:
            paired = test_procedure_1(sample1, sample2, q, alpha)
        except TooFewPairsError as exc:
            errors.append(str(exc))
    try:
        unpaired = test_procedure_2(sample1, sample2, q, alpha)
    except TooFewPairsError as exc:
        errors.append(str(exc))
    error = "; ".join(errors) if errors else None
    return ScanRow(
        q=unit_point(q), tr2=tr * tr, det=det, eigvals=proj.eigvals,
        paired=paired, unpaired=unpaired, error=error,
    )


def observation_scan(sample1, sample2, candidates, criterion: str = "tr2",
                     alpha: float = 0.05, threads: int | None = None) -> list:
    """Evaluate both procedures at each candidate point; sort by criterion.

    criterion "tr2" or "det" sorts rows in decreasing order of that column
    (stable, so input order breaks ties); "uniform" keeps the input order.
    """
    if criterion not in ("tr2", "det", "uniform"):
        raise ValueError(f"unknown scan criterion: {criterion!r}")
    cands = unit_points(candidates)
    if len(cands) == 0:
        raise ValueError("candidate list is empty")
    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda c: _scan_one(c, sample1, sample2, alpha), cands))
    else:
        rows = [_scan_one(c, sample1, sample2, alpha) for c in cands]
    if criterion == "uniform":
        return rows
    key = np.array([getattr(r, criterion) for r in rows])
    order = np.argsort(-key, kind="stable")
    return [rows[i] for i in order]


def det_sign_areas(sample1, sample2, grid) -> tuple[float, float]:
    """Fractions of grid points with det of the operator difference > 0 / <= 0.

    With a uniform grid these estimate the spherical area fractions of the
    two determinant-sign regions; the pair always sums to 1.
    """
    grid = unit_points(grid)
    dets = np.empty(len(grid))
    for i, q in enumerate(grid):
        dets[i] = np.linalg.det(projections_at(q, sample1, sample2).lhat)
    pos = float(np.mean(dets > 0.0))
    return pos, 1.0 - pos


@dataclass(frozen=True, eq=False)
class SampleProfile:
    """Per-point xi projections along directions sweeping the tangent circle."""

    base: np.ndarray
    thetas: np.ndarray   # (n_dirs,) angles in [0, 2*pi)
    values: np.ndarray   # (n_points, n_dirs), values[i, t] = <v_t, eta_i v_t>

    @property
    def mean(self) -> np.ndarray:
        return self.values.mean(axis=0)


def sample_profile(q, sample, n_dirs: int = 50, frame: TangentFrame | None = None) -> SampleProfile:
    """Profile of a sample at q along n_dirs equally spaced directions.

    Direction t is v(theta_t) = cos(theta_t) e1 + sin(theta_t) e2 with
    theta_t = 2 pi t / n_dirs. Values are quadratic forms of unit
    directions, so each profile is pi-periodic.
    """
    if n_dirs < 3:
        raise ValueError("need at least 3 directions")
    q = unit_point(q)
    if frame is None:
        frame = tangent_frame(q)
    u, _ = log_map_coords(q, unit_points(sample), frame)
    thetas = 2.0 * np.pi * np.arange(n_dirs) / n_dirs
    dirs = np.stack([np.cos(thetas), np.sin(thetas)], axis=0)  # (2, n_dirs)
    return SampleProfile(base=q, thetas=thetas, values=(u @ dirs) ** 2)


def operator_profile(op, n_dirs: int = 50) -> np.ndarray:
    """Quadratic form of a 2x2 operator along the same direction sweep."""
    thetas = 2.0 * np.pi * np.arange(n_dirs) / n_dirs
    dirs = np.stack([np.cos(thetas), np.sin(thetas)], axis=0)
    op = np.asarray(op, dtype=float)
    return np.einsum("it,ij,jt->t", dirs, op, dirs)
