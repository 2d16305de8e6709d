"""Regularized least-squares estimation of the linearized parameters.

Given transition samples, stack regressors ``z = (x0, u0, 1)`` column-wise
into ``Z`` and successors into ``X``; the ridge estimate is the closed form

    theta_hat = X Z.T (Z Z.T + lam I)^(-1).

The normal equations are solved through a diagonally equilibrated Cholesky
factorization: the Gram matrix is rescaled to unit diagonal before
factorizing, which keeps the solve accurate and makes the rank check
invariant to the wildly different regressor scales a long trajectory
produces.  With ``lam = 0`` a Gram matrix whose equilibrated eigenvalue
ratio falls below ``SINGULARITY_RTOL`` is reported as singular rather than
silently solved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .acquisition import Dataset
from .dynamics import Theta
from .errors import (
    DimensionMismatch,
    EmptyDataset,
    PreconditionViolated,
    SingularGram,
)
from .numerics import spd_solve, spectral_norm, sym_eig_extremes

#: an unregularized Gram matrix is declared singular when its equilibrated
#: smallest eigenvalue is below this fraction of the largest
SINGULARITY_RTOL = 1e-10


@dataclass(frozen=True)
class RegressionProblem:
    """Column-stacked regression data: ``X`` is ``(n, N)``, ``Z`` is
    ``(n + p + 1, N)`` with the all-ones row last."""

    X: np.ndarray
    Z: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        Z = np.asarray(self.Z, dtype=float)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Z", Z)
        if X.ndim != 2 or Z.ndim != 2 or X.shape[1] != Z.shape[1]:
            raise DimensionMismatch(
                f"X {X.shape} and Z {Z.shape} must share the sample axis"
            )
        if Z.shape[0] < X.shape[0] + 2:
            raise DimensionMismatch(
                "Z must stack state, input and constant rows"
            )
        if X.shape[1] == 0:
            raise EmptyDataset("regression requires at least one sample")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.Z.shape[0] - self.n - 1

    @property
    def N(self) -> int:
        return self.X.shape[1]


def assemble(ds: Dataset) -> RegressionProblem:
    """Build the regression problem from a dataset."""
    if len(ds) == 0:
        raise EmptyDataset("dataset has no samples")
    Z = np.vstack([ds.x0.T, ds.u0.T, np.ones((1, len(ds)))])
    return RegressionProblem(X=ds.x1.T, Z=Z)


def _equilibrated_gram(Z: np.ndarray, lam: float):
    """Gram with ridge, its unit-diagonal rescaling, and the scale vector."""
    d = Z.shape[0]
    G = Z @ Z.T + lam * np.eye(d)
    scale = np.sqrt(np.diag(G)).copy()
    scale[scale == 0.0] = 1.0
    Gs = G / np.outer(scale, scale)
    return G, Gs, scale


def _check_rank(Gs: np.ndarray):
    lo, hi = sym_eig_extremes(Gs)
    if lo <= SINGULARITY_RTOL * hi:
        raise SingularGram(
            "regressor Gram matrix is numerically singular "
            f"(equilibrated eigenvalue ratio {lo / hi if hi else 0.0:.3e}); "
            "add samples or use lam > 0"
        )


def _solve_gram(Gs: np.ndarray, scale: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve ``G Y = B`` using the equilibrated factorization."""
    Y = spd_solve(Gs, B / scale[:, None])
    return Y / scale[:, None]


def fit(prob: RegressionProblem, lam: float = 0.0) -> Theta:
    """Closed-form ridge estimate of ``[A B o]``.

    Raises :class:`SingularGram` when ``lam = 0`` and the Gram matrix is
    rank deficient (after diagonal equilibration).
    """
    if lam < 0:
        raise PreconditionViolated("lam must be nonnegative")
    _, Gs, scale = _equilibrated_gram(prob.Z, lam)
    if lam == 0.0:
        _check_rank(Gs)
    B = prob.Z @ prob.X.T
    Y = _solve_gram(Gs, scale, B)
    return Theta.from_matrix(Y.T, prob.n, prob.p)


def estimation_error(theta_hat: Theta, theta_true: Theta) -> float:
    """Spectral-norm distance ``||theta_hat - theta_true||``."""
    if theta_hat.matrix.shape != theta_true.matrix.shape:
        raise DimensionMismatch(
            f"parameter shapes differ: {theta_hat.matrix.shape} vs "
            f"{theta_true.matrix.shape}"
        )
    d = theta_hat.matrix - theta_true.matrix
    return spectral_norm(d) if d.any() else 0.0


class ErrorDecomposition(NamedTuple):
    """Spectral norms of the three exact error components and their sum's
    norm.  ``total`` equals the actual estimation error up to rounding."""

    reg_term: float
    noise_term: float
    nonlin_term: float
    total: float


def error_decomposition(
    prob: RegressionProblem,
    lam: float,
    theta_true: Theta,
    W: np.ndarray,
    R: np.ndarray,
) -> ErrorDecomposition:
    """Split ``theta_hat - theta_true`` into its exact components.

    With ``G = Z Z.T + lam I`` the identity

        theta_hat - theta_true = (-lam * theta_true + W Z.T + R Z.T) G^(-1)

    holds whenever ``X = theta_true Z + W + R``.  ``W`` and ``R`` are the
    realized noise and remainder, shape ``(n, N)`` each (see
    ``acquisition.realized_disturbances``).
    """
    if lam < 0:
        raise PreconditionViolated("lam must be nonnegative")
    W = np.asarray(W, dtype=float)
    R = np.asarray(R, dtype=float)
    if W.shape != (prob.n, prob.N) or R.shape != (prob.n, prob.N):
        raise DimensionMismatch(
            f"W and R must have shape ({prob.n}, {prob.N})"
        )
    _, Gs, scale = _equilibrated_gram(prob.Z, lam)
    if lam == 0.0:
        _check_rank(Gs)
    reg_mat = (
        -lam * _solve_gram(Gs, scale, theta_true.matrix.T).T
        if lam > 0
        else np.zeros_like(theta_true.matrix)
    )
    noise_mat = _solve_gram(Gs, scale, prob.Z @ W.T).T
    nonlin_mat = _solve_gram(Gs, scale, prob.Z @ R.T).T
    total_mat = reg_mat + noise_mat + nonlin_mat
    return ErrorDecomposition(
        reg_term=spectral_norm(reg_mat) if reg_mat.any() else 0.0,
        noise_term=spectral_norm(noise_mat) if noise_mat.any() else 0.0,
        nonlin_term=spectral_norm(nonlin_mat) if nonlin_mat.any() else 0.0,
        total=spectral_norm(total_mat) if total_mat.any() else 0.0,
    )


@dataclass
class EstimateReport:
    """Fit summary produced for the CLI and service."""

    theta_hat: Theta
    lam: float
    N: int
    gram_min_eig: float
    error_vs_truth: float | None = None
    meta: dict = field(default_factory=dict)

    def to_text(self) -> str:
        th = self.theta_hat
        lines = []
        if self.meta:
            lines.append(
                "# " + " ".join(f"{k}={v}" for k, v in self.meta.items())
            )
        lines.append(f"n={th.n} p={th.p} N={self.N}")
        lines.append(f"lambda={self.lam:.17g}")
        lines.append(f"gram_min_eig={self.gram_min_eig:.17g}")
        if self.error_vs_truth is not None:
            lines.append(f"error_vs_truth={self.error_vs_truth:.17g}")
        for name, M in (("A", th.A), ("B", th.B)):
            lines.append(f"{name}=")
            for row in M:
                lines.append(" ".join(f"{v:.17g}" for v in row))
        lines.append("o= " + " ".join(f"{v:.17g}" for v in th.o))
        return "\n".join(lines) + "\n"


def fit_report(
    ds: Dataset, lam: float = 0.0, theta_true: Theta | None = None
) -> EstimateReport:
    """Assemble, fit and package diagnostics for a dataset."""
    prob = assemble(ds)
    theta_hat = fit(prob, lam)
    gmin, _ = sym_eig_extremes(prob.Z @ prob.Z.T)
    err = (
        estimation_error(theta_hat, theta_true)
        if theta_true is not None
        else None
    )
    return EstimateReport(
        theta_hat=theta_hat,
        lam=lam,
        N=prob.N,
        gram_min_eig=gmin,
        error_vs_truth=err,
        meta={k: v for k, v in ds.metadata().items()},
    )
