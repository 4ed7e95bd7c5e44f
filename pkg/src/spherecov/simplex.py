"""Probability simplex utilities: projection, membership, random draws."""

from __future__ import annotations

import numpy as np

__all__ = ["project_to_simplex", "is_pmf", "as_pmf", "random_pmfs"]


def project_to_simplex(v) -> np.ndarray:
    """Euclidean projection of v onto {x : x >= 0, sum x = 1}.

    Sort-and-threshold algorithm: with u the coordinates sorted in
    decreasing order, the threshold is tau = (sum of the top rho entries
    minus 1) / rho, where rho is the largest index with u_rho > tau. The
    projection is max(v - tau, 0), which sums to 1 by construction.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ValueError("expected a 1-d vector")
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, len(v) + 1)
    valid = u - css / idx > 0.0
    rho = int(idx[valid][-1])
    tau = css[rho - 1] / rho
    return np.maximum(v - tau, 0.0)


def is_pmf(f, tol: float = 1e-12) -> bool:
    """True when f is entrywise nonnegative and sums to 1 within tol."""
    f = np.asarray(f, dtype=float)
    return bool(f.ndim == 1 and np.all(f >= 0.0) and abs(f.sum() - 1.0) <= tol)


def as_pmf(f, tol: float = 1e-12, what: str = "vector") -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if not is_pmf(f, tol):
        raise ValueError(f"{what} is not a probability vector within {tol:g}")
    return f


def random_pmfs(rng: np.random.Generator, k: int, n: int = 1) -> np.ndarray:
    """n Dirichlet(1, ..., 1) draws, i.e. uniform on the simplex, as (n, k)."""
    return rng.dirichlet(np.ones(k), size=n)
