"""Similarity-invariant functions on symmetric positive definite matrices.

The four invariants compare covariance operators:

  trdif(X, Y; Z) = |tr(Z^-1 X - Z^-1 Y)|
  trln2(X, Y)    = sqrt(tr(ln^2(X Y^-1)))          (affine-invariant distance)
  lik(X, Y)      = tr(X Y^-1) - ln|X Y^-1| - n      (not symmetric, no triangle)
  lnpr(X, Y)     = sqrt(ln(tr(X Y^-1) tr(Y X^-1) / n^2))

All are unchanged when X, Y (and the trdif reference Z) are congruence
transformed by any invertible A. Eigenvalues of the non-symmetric product
X Y^-1 are computed through the symmetric similar matrix Y^-1/2 X Y^-1/2 so
that they stay real and positive in floating point.

The lnpr form divides by n^2 inside the log so that lnpr(X, cX) = 0; by the
AM-GM inequality tr(X Y^-1) tr(Y X^-1) >= n^2, so the argument is >= 1.
"""

from __future__ import annotations

import numpy as np

from .errors import NotPositiveDefiniteError

__all__ = [
    "DEFINITENESS_FLOOR",
    "assert_spd",
    "is_spd",
    "spd_log",
    "spd_exp",
    "spd_inv_sqrt",
    "similar_eigvals",
    "h_trdif",
    "h_trln2",
    "h_lik",
    "h_lnpr",
    "make_invariant",
]

DEFINITENESS_FLOOR = 1e-12


def _sym(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    return 0.5 * (m + m.T)


def is_spd(m, floor: float = DEFINITENESS_FLOOR) -> bool:
    """True when the symmetric part of m has all eigenvalues above floor."""
    w = np.linalg.eigvalsh(_sym(m))
    return bool(w.min() > floor)


def assert_spd(m, floor: float = DEFINITENESS_FLOOR, what: str = "matrix") -> np.ndarray:
    m = _sym(m)
    w = np.linalg.eigvalsh(m)
    if w.min() <= floor:
        raise NotPositiveDefiniteError(
            f"{what} has minimum eigenvalue {w.min():.3e} (floor {floor:.1e})"
        )
    return m


def spd_log(x) -> np.ndarray:
    """Matrix logarithm of a symmetric positive definite matrix."""
    x = assert_spd(x)
    w, v = np.linalg.eigh(x)
    return (v * np.log(w)) @ v.T


def spd_exp(s) -> np.ndarray:
    """Matrix exponential of a symmetric matrix."""
    s = _sym(s)
    w, v = np.linalg.eigh(s)
    return (v * np.exp(w)) @ v.T


def spd_inv_sqrt(x) -> np.ndarray:
    """Inverse square root of a symmetric positive definite matrix."""
    x = assert_spd(x)
    w, v = np.linalg.eigh(x)
    return (v / np.sqrt(w)) @ v.T


def similar_eigvals(x, y) -> np.ndarray:
    """Eigenvalues of X Y^-1, via the symmetric similar matrix.

    X Y^-1 is similar to Y^-1/2 X Y^-1/2, which is symmetric positive
    definite, so the returned eigenvalues are real and positive.
    """
    x = assert_spd(x, what="X")
    yis = spd_inv_sqrt(np.asarray(y, dtype=float))
    return np.linalg.eigvalsh(_sym(yis @ x @ yis))


def h_trdif(x, y, z=None) -> float:
    """|tr(Z^-1 X - Z^-1 Y)|; Z defaults to the identity."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if z is None:
        return float(abs(np.trace(x) - np.trace(y)))
    z = assert_spd(z, what="reference Z")
    return float(abs(np.trace(np.linalg.solve(z, x - y))))


def h_trln2(x, y) -> float:
    """Affine-invariant distance sqrt(sum of squared log eigenvalues)."""
    sig = similar_eigvals(x, y)
    return float(np.sqrt(np.sum(np.log(sig) ** 2)))


def h_lik(x, y) -> float:
    """tr(X Y^-1) - ln|X Y^-1| - n. Nonnegative, zero iff X = Y."""
    sig = similar_eigvals(x, y)
    return float(np.sum(sig) - np.sum(np.log(sig)) - len(sig))


def h_lnpr(x, y) -> float:
    """sqrt(ln(tr(X Y^-1) tr(Y X^-1) / n^2)). Zero iff X = cY."""
    sig = similar_eigvals(x, y)
    n = len(sig)
    # AM-GM makes the argument >= 1; clip guards roundoff at equality.
    arg = max(float(np.sum(sig) * np.sum(1.0 / sig)) / (n * n), 1.0)
    return float(np.sqrt(np.log(arg)))


def make_invariant(kind: str, reference=None):
    """Return the invariant named by kind as a callable h(X, Y).

    kind is one of "trdif", "trln2", "lik", "lnpr". The reference matrix
    applies to trdif only (defaults to the identity).
    """
    kind = kind.lower()
    if kind == "trdif":
        if reference is not None:
            assert_spd(reference, what="reference Z")
        return lambda x, y: h_trdif(x, y, reference)
    if reference is not None:
        raise ValueError("a reference matrix applies to trdif only")
    try:
        return {"trln2": h_trln2, "lik": h_lik, "lnpr": h_lnpr}[kind]
    except KeyError:
        raise ValueError(f"unknown invariant kind: {kind!r}") from None
