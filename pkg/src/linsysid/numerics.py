"""Small dense linear-algebra kernels with strict input validation.

Everything here operates on plain ``numpy`` arrays.  The routines are thin
wrappers around LAPACK (via numpy/scipy) that add the shape, finiteness and
symmetry checks the rest of the package relies on, and translate low-level
factorization failures into the package's own exceptions.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NotPositiveDefinite, NotSymmetric

#: relative Frobenius-norm tolerance used when checking symmetry
SYMMETRY_RTOL = 1e-10


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Coerce ``M`` to a 2-D float array, rejecting bad shapes and non-finite
    entries."""
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] == 0 or A.shape[1] == 0:
        raise DimensionMismatch(
            f"{name} must be a non-empty 2-D array, got shape {A.shape}"
        )
    if not np.all(np.isfinite(A)):
        raise DimensionMismatch(f"{name} contains non-finite entries")
    return A


def check_symmetric(G, name: str = "matrix") -> np.ndarray:
    """Validate that ``G`` is square and symmetric within tolerance.

    Symmetry is measured relative to the Frobenius norm:
    ``||G - G.T||_F <= SYMMETRY_RTOL * ||G||_F`` (the zero matrix passes).
    """
    A = as_matrix(G, name)
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {A.shape}")
    skew = np.linalg.norm(A - A.T)
    if skew > SYMMETRY_RTOL * np.linalg.norm(A):
        raise NotSymmetric(
            f"{name} is not symmetric: ||G - G.T||_F = {skew:.3e}"
        )
    return A


def spd_solve(G, B) -> np.ndarray:
    """Solve ``G Y = B`` for symmetric positive definite ``G`` via Cholesky.

    Parameters
    ----------
    G : (d, d) array_like, symmetric positive definite
    B : (d, m) or (d,) array_like

    Returns
    -------
    (d, m) or (d,) ndarray
        Solution with the same trailing shape as ``B``.

    Raises
    ------
    NotSymmetric
        If ``G`` deviates from symmetry beyond tolerance.
    NotPositiveDefinite
        If the Cholesky factorization fails (zero or negative eigenvalue).
    DimensionMismatch
        For incompatible shapes or non-finite input.
    """
    A = check_symmetric(G, "G")
    Bv = np.asarray(B, dtype=float)
    squeeze = Bv.ndim == 1
    if squeeze:
        Bv = Bv[:, None]
    Bv = as_matrix(Bv, "B")
    if Bv.shape[0] != A.shape[0]:
        raise DimensionMismatch(
            f"G has {A.shape[0]} rows but B has {Bv.shape[0]}"
        )
    try:
        c, low = scipy.linalg.cho_factor(A, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc
    Y = scipy.linalg.cho_solve((c, low), Bv, check_finite=False)
    return Y[:, 0] if squeeze else Y


def spectral_norm(M) -> float:
    """Largest singular value of ``M`` (the operator 2-norm)."""
    A = as_matrix(M, "M")
    if not A.any():
        return 0.0
    return float(np.linalg.norm(A, 2))


def sym_eig_extremes(G) -> tuple[float, float]:
    """Smallest and largest eigenvalue of a symmetric matrix.

    Returns ``(lam_min, lam_max)``.  Only the symmetric part is trusted; the
    input must pass :func:`check_symmetric` first.
    """
    A = check_symmetric(G, "G")
    w = np.linalg.eigvalsh(A)
    return float(w[0]), float(w[-1])
