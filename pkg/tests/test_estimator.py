"""Tests for the closed-form ridge estimator and its error decomposition.

Independent oracles: the normal equations are re-solved with numpy's LU
path on the raw (unequilibrated) Gram, and the ridge objective is probed
directly with random perturbations.
"""

import numpy as np
import pytest

from linsysid.acquisition import (
    collect_multi,
    collect_single,
    realized_disturbances,
)
from linsysid.dynamics import Theta, pendulum, random_linear
from linsysid.errors import (
    EmptyDataset,
    PreconditionViolated,
    SingularGram,
)
from linsysid.estimator import (
    RegressionProblem,
    assemble,
    error_decomposition,
    estimation_error,
    fit,
    fit_report,
)
from linsysid.noise import NoiseSpec, SeedPolicy

NO_NOISE = NoiseSpec(kind="none", sigma_w=0.0)
GAUSS = NoiseSpec(kind="gaussian", sigma_w=0.5)


def _make_dataset(seed=0, N=60, q=0.8, noise=GAUSS):
    return collect_multi(pendulum(), q, N, noise, SeedPolicy(seed))


def test_assemble_layout():
    ds = _make_dataset(N=12)
    prob = assemble(ds)
    assert prob.X.shape == (2, 12)
    assert prob.Z.shape == (4, 12)
    assert np.array_equal(prob.Z[:2], ds.x0.T)
    assert np.array_equal(prob.Z[2:3], ds.u0.T)
    assert np.array_equal(prob.Z[3], np.ones(12))
    assert prob.n == 2 and prob.p == 1 and prob.N == 12


def test_assemble_restart_gram():
    """n=p=1, q=1, N=8 gives Z Z.T = diag(4, 4, 8)."""
    lin = random_linear(1, 1, spectral_radius=0.5, seed=0)
    ds = collect_multi(lin, 1.0, 8, NO_NOISE, SeedPolicy(0))
    prob = assemble(ds)
    assert np.allclose(prob.Z @ prob.Z.T, np.diag([4.0, 4.0, 8.0]), atol=1e-14)


def test_assemble_empty():
    from linsysid.acquisition import Dataset

    ds = Dataset(
        x0=np.zeros((0, 2)), u0=np.zeros((0, 1)), x1=np.zeros((0, 2))
    )
    with pytest.raises(EmptyDataset):
        assemble(ds)


def test_exact_recovery_linear_noiseless():
    """Noiseless linear data identifies [A B o] to machine precision."""
    lin = random_linear(3, 2, spectral_radius=0.8, seed=2)
    ds = collect_multi(lin, 1.0, 40, NO_NOISE, SeedPolicy(0))
    theta_hat = fit(assemble(ds))
    assert estimation_error(theta_hat, lin.theta) <= 1e-9


def test_fit_matches_lu_normal_equations():
    """theta_hat == X Z.T (Z Z.T + lam I)^-1 solved independently via LU."""
    ds = _make_dataset(seed=3, N=80)
    prob = assemble(ds)
    for lam in (0.0, 0.7, 5.0):
        theta_hat = fit(prob, lam)
        G = prob.Z @ prob.Z.T + lam * np.eye(4)
        ref = np.linalg.solve(G.T, (prob.Z @ prob.X.T)).T
        assert np.max(np.abs(theta_hat.matrix - ref)) < 1e-10, lam


def test_fit_permutation_invariance():
    """Sample order cannot change the closed-form solution."""
    ds = _make_dataset(seed=4, N=50)
    prob = assemble(ds)
    rng = np.random.default_rng(0)
    perm = rng.permutation(50)
    prob2 = RegressionProblem(X=prob.X[:, perm], Z=prob.Z[:, perm])
    a = fit(prob, 0.3).matrix
    b = fit(prob2, 0.3).matrix
    assert np.max(np.abs(a - b)) < 1e-12


def test_fit_large_lambda_shrinks_to_zero():
    """As lam -> inf, theta_hat ~ X Z.T / lam -> 0."""
    ds = _make_dataset(seed=5, N=40)
    prob = assemble(ds)
    theta_hat = fit(prob, 1e12)
    scale = np.linalg.norm(prob.X @ prob.Z.T)
    assert np.linalg.norm(theta_hat.matrix) <= 1e-6 * scale


def test_fit_monotone_shrinkage():
    """The Frobenius norm of the ridge solution decreases in lam
    (restart data has an orthogonal Gram, so rows shrink coordinatewise)."""
    ds = _make_dataset(seed=6, N=48, q=0.5)
    prob = assemble(ds)
    norms = [
        np.linalg.norm(fit(prob, lam).matrix)
        for lam in (0.0, 0.1, 1.0, 10.0, 100.0)
    ]
    assert all(a >= b - 1e-12 for a, b in zip(norms, norms[1:]))


def test_fit_ridge_objective_dominance():
    """The closed form minimizes ||X - M Z||_F^2 + lam ||M||_F^2: any of
    100 random perturbations of theta_hat scores no better."""
    ds = _make_dataset(seed=7, N=30)
    prob = assemble(ds)
    lam = 0.5
    theta_hat = fit(prob, lam).matrix

    def J(M):
        return (
            np.linalg.norm(prob.X - M @ prob.Z) ** 2
            + lam * np.linalg.norm(M) ** 2
        )

    base = J(theta_hat)
    rng = np.random.default_rng(1)
    for _ in range(100):
        step_size = 10.0 ** rng.uniform(-6, 0)
        P = rng.standard_normal(theta_hat.shape) * step_size
        assert J(theta_hat + P) >= base - 1e-9
    print("✓ ridge objective dominance over 100 perturbations")


def test_fit_ridge_stationarity():
    """Gradient check: theta_hat (Z Z.T + lam I) = X Z.T."""
    ds = _make_dataset(seed=8, N=64)
    prob = assemble(ds)
    lam = 2.0
    theta_hat = fit(prob, lam).matrix
    lhs = theta_hat @ (prob.Z @ prob.Z.T + lam * np.eye(4))
    rhs = prob.X @ prob.Z.T
    assert np.max(np.abs(lhs - rhs)) <= 1e-9 * (1.0 + np.linalg.norm(rhs))


def test_fit_singular_gram_raises():
    # one sample cannot determine 4 parameters
    prob = RegressionProblem(
        X=np.array([[1.0], [2.0]]), Z=np.array([[1.0], [0.5], [1.0], [1.0]])
    )
    with pytest.raises(SingularGram):
        fit(prob, 0.0)
    # ridge rescues it
    fit(prob, 1e-3)


def test_fit_singularity_check_is_scale_invariant():
    """Rank-deficiency detection ignores column scaling: duplicated state
    coordinates stay singular even when magnitudes differ wildly."""
    rng = np.random.default_rng(2)
    base = rng.standard_normal(30)
    Z = np.vstack([1e6 * base, 1e-6 * base, np.ones(30)])  # rank 2
    X = rng.standard_normal((1, 30))
    with pytest.raises(SingularGram):
        fit(RegressionProblem(X=X, Z=Z), 0.0)
    # and a well-scaled full-rank problem with huge dynamic range passes
    Z2 = np.vstack(
        [1e6 * rng.standard_normal(30), 1e-6 * rng.standard_normal(30), np.ones(30)]
    )
    fit(RegressionProblem(X=X, Z=Z2), 0.0)


def test_fit_rejects_negative_lambda():
    prob = assemble(_make_dataset(N=20))
    with pytest.raises(PreconditionViolated):
        fit(prob, -0.1)


def test_estimation_error_values():
    a = Theta(np.eye(2), np.zeros((2, 1)), np.zeros(2))
    assert estimation_error(a, a) == 0.0
    b = Theta(np.eye(2) * 2.0, np.zeros((2, 1)), np.zeros(2))
    # difference is diag(1, 1, 0, 0): spectral norm 1
    assert abs(estimation_error(a, b) - 1.0) < 1e-12


def test_error_decomposition_zero_noise_linear():
    """Linear noiseless data at lam=0: every component vanishes."""
    lin = random_linear(2, 1, spectral_radius=0.6, seed=5)
    ds = collect_multi(lin, 1.0, 24, NO_NOISE, SeedPolicy(0))
    prob = assemble(ds)
    W, R = realized_disturbances(lin, ds)
    dec = error_decomposition(prob, 0.0, lin.theta, W, R)
    assert dec.reg_term == 0.0
    assert dec.noise_term <= 1e-12
    assert dec.nonlin_term <= 1e-12
    assert dec.total <= 1e-12


def test_error_decomposition_pure_regularization():
    """Linear noiseless data with lam > 0: the error is exactly the
    regularization bias, so total == reg_term."""
    lin = random_linear(2, 1, spectral_radius=0.6, seed=6)
    ds = collect_multi(lin, 1.0, 24, NO_NOISE, SeedPolicy(0))
    prob = assemble(ds)
    W, R = realized_disturbances(lin, ds)
    dec = error_decomposition(prob, 3.0, lin.theta, W, R)
    assert dec.noise_term <= 1e-12 and dec.nonlin_term <= 1e-12
    assert abs(dec.total - dec.reg_term) <= 1e-12
    direct = estimation_error(fit(prob, 3.0), lin.theta)
    assert abs(dec.total - direct) <= 1e-10


def test_error_decomposition_identity():
    """reg + noise + nonlin components sum to the actual error matrix:
    |total - ||theta_hat - theta||| <= 1e-9 on a noisy nonlinear fit."""
    sysm = pendulum()
    for lam in (0.0, 1.5):
        ds = collect_multi(sysm, 0.9, 100, GAUSS, SeedPolicy(9))
        prob = assemble(ds)
        W, R = realized_disturbances(sysm, ds)
        dec = error_decomposition(prob, lam, sysm.theta, W, R)
        direct = estimation_error(fit(prob, lam), sysm.theta)
        assert abs(dec.total - direct) <= 1e-9, lam
        # triangle inequality between the pieces
        assert dec.total <= dec.reg_term + dec.noise_term + dec.nonlin_term + 1e-12


def test_error_decomposition_single_trajectory():
    sysm = pendulum()
    ds, div = collect_single(sysm, 0.1, 400, GAUSS, SeedPolicy(2), trial=0)
    assert div is None
    prob = assemble(ds)
    W, R = realized_disturbances(sysm, ds)
    dec = error_decomposition(prob, 0.5, sysm.theta, W, R)
    direct = estimation_error(fit(prob, 0.5), sysm.theta)
    assert abs(dec.total - direct) <= 1e-8 * (1.0 + direct)


def test_fit_report_contents():
    sysm = pendulum()
    ds = _make_dataset(seed=1, N=40, noise=NO_NOISE)
    rep = fit_report(ds, lam=0.0, theta_true=sysm.theta)
    assert rep.N == 40
    assert rep.error_vs_truth is not None and rep.error_vs_truth < 0.1
    assert rep.gram_min_eig > 0
    text = rep.to_text()
    assert text.startswith("# ")
    assert "lambda=0" in text
    assert "A=" in text and "B=" in text and "o=" in text
