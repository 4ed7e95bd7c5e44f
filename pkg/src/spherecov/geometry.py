"""Geometry of the unit 2-sphere.

Closed-form log/exp maps, geodesic distance, deterministic orthonormal
tangent frames, rotations, uniform sampling, and the geographic-coordinate
metric used by the coordinate-invariance cross-checks.

All points are unit 3-vectors (numpy arrays). Tangent vectors are stored as
2 coordinates in an orthonormal frame at their base point, so the metric
representation in that frame is the identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AntipodalPointError, FrameMismatchError

__all__ = [
    "ANTIPODAL_EPS",
    "COINCIDENT_CAP",
    "TangentFrame",
    "TangentVec",
    "unit_point",
    "unit_points",
    "tangent_frame",
    "log_map",
    "log_map_coords",
    "exp_map",
    "geodesic_distance",
    "geodesic_distances",
    "rotation_about",
    "rotate_points",
    "uniform_sample",
    "geographic_metric",
    "geographic_point",
    "geographic_basis",
]

# Inner-product cutoffs for the closed-form log map. Below -1 + ANTIPODAL_EPS
# the denominator sqrt(1 - c^2) has lost all precision; above COINCIDENT_CAP
# the map is numerically 0/0 and the limit (the zero vector) is returned.
ANTIPODAL_EPS = 1e-9
COINCIDENT_CAP = 1.0 - 1e-12


def unit_point(p) -> np.ndarray:
    """Return p as a unit 3-vector, renormalizing if needed."""
    p = np.asarray(p, dtype=float)
    if p.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {p.shape}")
    n = np.linalg.norm(p)
    if n == 0.0 or not np.isfinite(n):
        raise ValueError("cannot normalize a zero or non-finite vector")
    return p / n


def unit_points(points) -> np.ndarray:
    """Return an (n, 3) array of unit rows, renormalizing each row."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"expected an (n, 3) array, got shape {pts.shape}")
    norms = np.linalg.norm(pts, axis=1)
    if np.any(norms == 0.0) or not np.all(np.isfinite(norms)):
        raise ValueError("cannot normalize zero or non-finite rows")
    return pts / norms[:, None]


@dataclass(frozen=True, eq=False)
class TangentFrame:
    """Right-handed orthonormal frame (e1, e2, base) of the tangent plane."""

    base: np.ndarray
    e1: np.ndarray
    e2: np.ndarray

    def coords(self, ambient) -> np.ndarray:
        """Coordinates of ambient tangent vector(s) in this frame."""
        ambient = np.asarray(ambient, dtype=float)
        return np.stack([ambient @ self.e1, ambient @ self.e2], axis=-1)

    def lift(self, uv) -> np.ndarray:
        """Ambient 3-vector(s) of frame coordinates uv."""
        uv = np.asarray(uv, dtype=float)
        return np.multiply.outer(uv[..., 0], self.e1) + np.multiply.outer(uv[..., 1], self.e2)

    def matches(self, other: "TangentFrame", tol: float = 1e-12) -> bool:
        return (
            np.allclose(self.base, other.base, atol=tol)
            and np.allclose(self.e1, other.e1, atol=tol)
            and np.allclose(self.e2, other.e2, atol=tol)
        )


@dataclass(frozen=True, eq=False)
class TangentVec:
    """Tangent vector at frame.base, stored as 2 frame coordinates."""

    frame: TangentFrame
    u: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.hypot(self.u[0], self.u[1]))

    def ambient(self) -> np.ndarray:
        return self.frame.lift(self.u)


def tangent_frame(q) -> TangentFrame:
    """Deterministic orthonormal frame at q.

    Picks the ambient axis least aligned with q, Gram-Schmidts it into e1,
    and sets e2 = q x e1, giving a right-handed triple (e1, e2, q).
    """
    q = unit_point(q)
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(q)))] = 1.0
    e1 = axis - np.dot(axis, q) * q
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(q, e1)
    return TangentFrame(base=q, e1=e1, e2=e2)


def geodesic_distance(q, p) -> float:
    """Great-circle distance arccos(<q, p>), in [0, pi]."""
    c = float(np.dot(unit_point(q), unit_point(p)))
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def geodesic_distances(q, points) -> np.ndarray:
    """Distances from q to each row of points."""
    q = unit_point(q)
    pts = np.asarray(points, dtype=float)
    return np.arccos(np.clip(pts @ q, -1.0, 1.0))


def log_map_coords(q, points, frame: TangentFrame | None = None):
    """Batched log map at q, returned as frame coordinates.

    Args:
        q: base point.
        points: (n, 3) array of target points.
        frame: frame at q; the deterministic frame is built when omitted.

    Returns:
        (coords, dists): (n, 2) frame coordinates of log_q(p) and the (n,)
        geodesic distances.

    Raises:
        AntipodalPointError: if any point is antipodal to q within tolerance.
    """
    q = unit_point(q)
    if frame is None:
        frame = tangent_frame(q)
    pts = np.asarray(points, dtype=float)
    c = np.clip(pts @ q, -1.0, 1.0)
    if np.any(c <= -1.0 + ANTIPODAL_EPS):
        raise AntipodalPointError("log map undefined at an antipodal point")
    d = np.arccos(c)
    s = np.sqrt(np.maximum(1.0 - c * c, 0.0))
    # d/s -> 1 as p -> q; points beyond COINCIDENT_CAP get the exact zero vector.
    near = c > COINCIDENT_CAP
    safe_s = np.where(s > 0.0, s, 1.0)
    scale = np.where(near, 0.0, d / safe_s)
    ambient = scale[:, None] * (pts - c[:, None] * q)
    return frame.coords(ambient), d


def log_map(q, p, frame: TangentFrame | None = None) -> TangentVec:
    """Log map of a single point p at base q.

    The closed form is arccos(c)/sqrt(1 - c^2) * (p - c q) with c = <p, q>.
    Near-coincident pairs (c > COINCIDENT_CAP) return the zero vector.

    Raises:
        AntipodalPointError: when c <= -1 + ANTIPODAL_EPS.
    """
    q = unit_point(q)
    if frame is None:
        frame = tangent_frame(q)
    coords, _ = log_map_coords(q, np.asarray(p, dtype=float)[None, :], frame)
    return TangentVec(frame=frame, u=coords[0])


def exp_map(q, v: TangentVec) -> np.ndarray:
    """Exponential map at q: cos(|v|) q + sin(|v|) v/|v|.

    The base of v's frame must be q (FrameMismatchError otherwise).
    """
    q = unit_point(q)
    if not np.allclose(q, v.frame.base, atol=1e-12):
        raise FrameMismatchError("tangent vector is based at a different point")
    t = v.norm
    if t == 0.0:
        return q.copy()
    if t >= np.pi:
        raise ValueError("tangent vector norm must be below pi")
    direction = v.ambient() / t
    return np.cos(t) * q + np.sin(t) * direction


def rotation_about(axis, angle: float) -> np.ndarray:
    """Rodrigues rotation matrix about a unit axis."""
    axis = unit_point(axis)
    k = np.array(
        [
            [0.0, -axis[2], axis[1]],
            [axis[2], 0.0, -axis[0]],
            [-axis[1], axis[0], 0.0],
        ]
    )
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def rotate_points(points, axis, angle: float) -> np.ndarray:
    """Rotate each row of points about the axis by the given angle."""
    pts = np.asarray(points, dtype=float)
    return pts @ rotation_about(axis, angle).T


def uniform_sample(rng: np.random.Generator, n: int) -> np.ndarray:
    """n i.i.d. uniform points on the sphere (normalized Gaussian draws)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    z = rng.standard_normal((n, 3))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def geographic_metric(theta: float) -> np.ndarray:
    """Metric diag(1, cos^2(theta)) of the (latitude, longitude) chart."""
    if not abs(theta) < np.pi / 2:
        raise ValueError("latitude must satisfy |theta| < pi/2")
    return np.diag([1.0, np.cos(theta) ** 2])


def geographic_point(theta: float, phi: float) -> np.ndarray:
    """Point at latitude theta and longitude phi."""
    return np.array(
        [np.cos(theta) * np.cos(phi), np.cos(theta) * np.sin(phi), np.sin(theta)]
    )


def geographic_basis(theta: float, phi: float):
    """Coordinate basis (d/dtheta, d/dphi) of the geographic chart.

    The basis is not orthonormal: |d/dphi| = cos(theta), matching the
    geographic_metric entries. Used only by coordinate-invariance checks.
    """
    if not abs(theta) < np.pi / 2:
        raise ValueError("latitude must satisfy |theta| < pi/2")
    b_theta = np.array(
        [-np.sin(theta) * np.cos(phi), -np.sin(theta) * np.sin(phi), np.cos(theta)]
    )
    b_phi = np.array([-np.cos(theta) * np.sin(phi), np.cos(theta) * np.cos(phi), 0.0])
    return b_theta, b_phi
