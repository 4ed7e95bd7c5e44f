"""Covariance operator fields of spherical distributions.

A point operator at q for a point p is the weighted rank-1 matrix
(log_q p)(log_q p)' r(d(q, p)) in an orthonormal frame at q. Averaging point
operators over a sample, or mixing them with pmf weights over a fixed
domain, produces the covariance operators studied here. Two weight choices
are supported:

  unit:    r(t) = 1,               trace of the operator is t^2
  pihalf:  r(t) = (1 - pi/(2t))^2, trace of the operator is (t - pi/2)^2

The pihalf weight is undefined at coincident points: the trace limit is
(pi/2)^2 but the rank-1 direction has no limit, so coincidence is an error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CoincidentPointError,
    DimensionMismatchError,
    IterationLimitError,
    NotHemisphericError,
    ObservationMismatchError,
    FrameMismatchError,
)
from .geometry import TangentFrame, TangentVec, log_map_coords, tangent_frame, unit_point, unit_points, exp_map
from .simplex import as_pmf, project_to_simplex
from .spd import make_invariant

__all__ = [
    "COINCIDENT_EPS",
    "WEIGHT_KINDS",
    "weight_value",
    "point_operator",
    "point_operators",
    "sample_cov_operator",
    "CovField",
    "pmf_cov_field",
    "quadratic_form",
    "field_distance",
    "hemispheric_witness",
    "intrinsic_mean",
]

COINCIDENT_EPS = 1e-8
WEIGHT_KINDS = ("unit", "pihalf")


def weight_value(kind: str, t):
    """Evaluate the weight function r at distance(s) t."""
    t = np.asarray(t, dtype=float)
    if kind == "unit":
        return np.ones_like(t)
    if kind == "pihalf":
        return (1.0 - np.pi / (2.0 * t)) ** 2
    raise ValueError(f"unknown weight kind: {kind!r}")


def point_operators(q, points, weight: str = "unit", frame: TangentFrame | None = None):
    """Point operators at q for each row of points.

    Returns:
        (ops, dists): (n, 2, 2) operators in the frame at q and the (n,)
        geodesic distances.

    Raises:
        AntipodalPointError: any point antipodal to q.
        CoincidentPointError: pihalf weight with some d(q, p) below 1e-8.
    """
    if weight not in WEIGHT_KINDS:
        raise ValueError(f"unknown weight kind: {weight!r}")
    u, d = log_map_coords(q, points, frame)
    if weight == "pihalf":
        if np.any(d < COINCIDENT_EPS):
            raise CoincidentPointError(
                "pihalf weight is undefined at a coincident point pair"
            )
        w = weight_value("pihalf", d)
    else:
        w = np.ones_like(d)
    ops = w[:, None, None] * np.einsum("ni,nj->nij", u, u)
    return ops, d


def point_operator(q, p, weight: str = "unit", frame: TangentFrame | None = None) -> np.ndarray:
    """Single-point operator (log_q p)(log_q p)' r(d(q, p)) at q."""
    ops, _ = point_operators(q, np.asarray(p, dtype=float)[None, :], weight, frame)
    return ops[0]


def sample_cov_operator(q, sample, weight: str = "unit", frame: TangentFrame | None = None) -> np.ndarray:
    """Arithmetic mean of the point operators of a sample at q."""
    sample = np.asarray(sample, dtype=float)
    if sample.ndim != 2 or len(sample) == 0:
        raise DimensionMismatchError("sample must be a nonempty (n, 3) array")
    ops, _ = point_operators(q, sample, weight, frame)
    return ops.mean(axis=0)


@dataclass(frozen=True, eq=False)
class CovField:
    """Observation points paired with 2x2 operators in their canonical frames."""

    obs: np.ndarray  # (k, 3)
    ops: np.ndarray  # (k, 2, 2)

    def __post_init__(self):
        if len(self.obs) != len(self.ops):
            raise DimensionMismatchError("obs and ops lengths differ")

    def frame(self, j: int) -> TangentFrame:
        return tangent_frame(self.obs[j])


def pmf_cov_field(f, domain, obs, weight: str = "unit") -> CovField:
    """Discrete covariance field sum_i f_i op(q_j, p_i) at each q_j.

    Linear in f. Admissibility of every (q_j, p_i) pair is validated by the
    underlying point-operator construction.
    """
    f = as_pmf(f, what="pmf")
    domain = unit_points(domain)
    obs = unit_points(obs)
    if len(f) != len(domain):
        raise DimensionMismatchError(
            f"pmf length {len(f)} != domain size {len(domain)}"
        )
    ops = np.empty((len(obs), 2, 2))
    for j, q in enumerate(obs):
        point_ops, _ = point_operators(q, domain, weight)
        ops[j] = np.einsum("i,ijk->jk", f, point_ops)
    return CovField(obs=obs, ops=ops)


def quadratic_form(v: TangentVec, op, op_frame: TangentFrame) -> float:
    """<v, op v> in frame coordinates (the metric is the identity there).

    Raises:
        FrameMismatchError: v and op are expressed in different frames.
    """
    if not v.frame.matches(op_frame):
        raise FrameMismatchError("tangent vector and operator frames differ")
    op = np.asarray(op, dtype=float)
    return float(v.u @ op @ v.u)


def field_distance(f1: CovField, f2: CovField, h="trln2") -> float:
    """Sum over shared observation points of h(op1_j, op2_j)."""
    if isinstance(h, str):
        h = make_invariant(h)
    if len(f1.obs) != len(f2.obs) or not np.allclose(f1.obs, f2.obs, atol=1e-12):
        raise ObservationMismatchError("fields are on different observation sets")
    return float(sum(h(a, b) for a, b in zip(f1.ops, f2.ops)))


def hemispheric_witness(points, tol: float = 1e-8, max_iter: int = 20000) -> np.ndarray:
    """A direction q with <p_i, q> > 0 for all points, if one exists.

    Computes the minimum-norm point z of the convex hull of the points by
    projected gradient descent over mixture weights. The hull avoids the
    origin exactly when the points fit in an open hemisphere, and then
    q = z/|z| satisfies <p_i, q> >= |z| > 0 for every i by optimality of z.

    Raises:
        NotHemisphericError: the minimum norm is below tol.
    """
    pts = unit_points(points)
    n = len(pts)
    gram = pts @ pts.T
    lam = np.full(n, 1.0 / n)
    step = 1.0 / max(np.linalg.eigvalsh(gram).max(), 1e-12)
    for _ in range(max_iter):
        new = project_to_simplex(lam - step * (gram @ lam))
        if np.max(np.abs(new - lam)) < 1e-14:
            lam = new
            break
        lam = new
    z = pts.T @ lam
    norm = np.linalg.norm(z)
    if norm <= tol:
        raise NotHemisphericError(
            "points are not contained in any open hemisphere"
        )
    return z / norm


def intrinsic_mean(sample, tol: float = 1e-10, max_iter: int = 1000) -> np.ndarray:
    """Karcher mean by the fixed-point iteration q <- exp_q(mean log_q p_i).

    The sample must lie in an open hemisphere (checked up front), which
    keeps the mean unique at the scales used here. Initialization is the
    normalized extrinsic mean.

    Raises:
        NotHemisphericError: no open hemisphere contains the sample.
        IterationLimitError: gradient norm still above tol after max_iter.
    """
    pts = unit_points(sample)
    hemispheric_witness(pts)
    q = unit_point(pts.mean(axis=0))
    for _ in range(max_iter):
        frame = tangent_frame(q)
        coords, _ = log_map_coords(q, pts, frame)
        g = coords.mean(axis=0)
        if np.linalg.norm(g) < tol:
            return q
        q = exp_map(q, TangentVec(frame=frame, u=g))
    raise IterationLimitError(
        f"intrinsic mean did not reach tolerance {tol:g} in {max_iter} iterations"
    )
