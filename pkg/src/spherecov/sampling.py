"""Seeded samplers for the ring-shaped experiment distributions.

The density family is f(p; a, mu) proportional to exp(-(d^4(mu, p) - a)^2)
with d the geodesic distance. Its mode set is the ring d = a^(1/4) around
mu (a circle for a > 0, the point mu itself for a = 0). The alternative
reading exp(-(d^2 - a)^2) is available as concentration="squared".

Sampling is plain rejection from the uniform envelope: the unnormalized
density is bounded by 1 exactly, so a uniform proposal p is accepted with
probability equal to the density value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AntipodalPointError
from .geometry import ANTIPODAL_EPS, geodesic_distances, rotate_points, uniform_sample, unit_point

__all__ = [
    "RingDensity",
    "ring_density_unnormalized",
    "rejection_sample",
    "rotate_sample",
]

_CONCENTRATIONS = ("quartic", "squared")


@dataclass(frozen=True)
class RingDensity:
    """Ring density parameters: ring size a >= 0 and center mu.

    mu is the center of the ring, not a mean of the distribution.
    """

    a: float
    mu: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    concentration: str = "quartic"

    def __post_init__(self):
        if self.a < 0.0:
            raise ValueError("ring parameter a must be nonnegative")
        if self.concentration not in _CONCENTRATIONS:
            raise ValueError(f"unknown concentration: {self.concentration!r}")
        object.__setattr__(self, "mu", unit_point(self.mu))


def _density_values(params: RingDensity, dists) -> np.ndarray:
    d = np.asarray(dists, dtype=float)
    power = 4.0 if params.concentration == "quartic" else 2.0
    return np.exp(-((d ** power - params.a) ** 2))


def ring_density_unnormalized(p, params: RingDensity) -> float:
    """Unnormalized density at p, a value in (0, 1].

    Raises:
        AntipodalPointError: p antipodal to the center within tolerance.
    """
    p = unit_point(p)
    if float(p @ params.mu) <= -1.0 + ANTIPODAL_EPS:
        raise AntipodalPointError("density evaluation at the center's antipode")
    d = geodesic_distances(params.mu, p[None, :])
    return float(_density_values(params, d)[0])


def rejection_sample(params: RingDensity, n: int, rng: np.random.Generator,
                     return_proposals: bool = False):
    """n i.i.d. draws from the ring density by uniform-envelope rejection.

    Proposals are uniform sphere points, accepted with probability equal to
    the unnormalized density. Antipodal proposals (measure zero up to the
    antipodal tolerance) are always rejected. Deterministic given rng state.

    Returns the (n, 3) sample, or (sample, n_proposals) when
    return_proposals is set.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    out = np.empty((n, 3))
    got = 0
    proposals = 0
    while got < n:
        chunk = max(4 * (n - got), 64)
        pts = uniform_sample(rng, chunk)
        cosines = pts @ params.mu
        dens = _density_values(params, np.arccos(np.clip(cosines, -1.0, 1.0)))
        accept = (rng.random(chunk) < dens) & (cosines > -1.0 + ANTIPODAL_EPS)
        proposals += chunk
        accepted = pts[accept]
        take = min(n - got, len(accepted))
        out[got : got + take] = accepted[:take]
        got += take
    if return_proposals:
        return out, proposals
    return out


def rotate_sample(points, axis, angle: float) -> np.ndarray:
    """Rotate every point about the axis through a given unit point.

    Preserves all pairwise geodesic distances and every distance to the
    axis point.
    """
    return rotate_points(points, axis, angle)
