"""Tests for the system models and their linearization bookkeeping."""

import math

import numpy as np
import pytest

from linsysid.dynamics import (
    SystemModel,
    Theta,
    estimate_beta,
    get_system,
    linear_prediction,
    linear_system,
    pendulum,
    random_linear,
    remainder,
    step,
    strongly_nonlinear,
)
from linsysid.errors import (
    ConfigInvalid,
    DimensionMismatch,
    PreconditionViolated,
)


def test_theta_matrix_layout():
    th = Theta(A=[[1.0, 2.0], [3.0, 4.0]], B=[[5.0], [6.0]], o=[7.0, 8.0])
    assert th.n == 2 and th.p == 1
    assert np.array_equal(
        th.matrix, [[1.0, 2.0, 5.0, 7.0], [3.0, 4.0, 6.0, 8.0]]
    )
    back = Theta.from_matrix(th.matrix, 2, 1)
    assert np.array_equal(back.A, th.A)
    assert np.array_equal(back.B, th.B)
    assert np.array_equal(back.o, th.o)


def test_theta_rejects_bad_shapes():
    with pytest.raises(DimensionMismatch):
        Theta(A=[[1.0, 2.0]], B=[[1.0]], o=[0.0])
    with pytest.raises(DimensionMismatch):
        Theta(A=np.eye(2), B=np.ones((3, 1)), o=np.zeros(2))
    with pytest.raises(DimensionMismatch):
        Theta(A=np.eye(2), B=np.ones((2, 1)), o=[np.inf, 0.0])


def test_pendulum_step_values():
    sysm = pendulum()
    # equilibrium at the origin
    assert np.array_equal(step(sysm, [0.0, 0.0], [0.0]), [0.0, 0.0])
    # f(pi/2, 0, 0) = (pi/2, -0.49 sin(pi/2)) = (pi/2, -0.49)
    nxt = step(sysm, [math.pi / 2, 0.0], [0.0])
    assert abs(nxt[0] - math.pi / 2) < 1e-15
    assert abs(nxt[1] + 0.49) < 1e-15
    # additive noise enters the update directly
    w = np.array([0.25, -0.5])
    assert np.allclose(
        step(sysm, [0.3, -0.2], [0.1], w) - step(sysm, [0.3, -0.2], [0.1]),
        w,
        atol=1e-15,
    )


def test_strong_step_values():
    sysm = strongly_nonlinear()
    # f(0, 0, 0) = (1, 1): the constant drift
    assert np.array_equal(step(sysm, [0.0, 0.0], [0.0]), [1.0, 1.0])
    # f(0.2, 0.1, 0):
    #   first  = 0.9*0.2 + 0.5*0.1 + 0.2^3 + 0.1^5 + 1 = 1.23801
    #   second = 0.8*0.1 + 0.2*0.1 + 1 = 1.1
    nxt = step(sysm, [0.2, 0.1], [0.0])
    assert abs(nxt[0] - 1.23801) < 1e-12
    assert abs(nxt[1] - 1.1) < 1e-12


def test_remainder_values():
    sysm = pendulum()
    # remainder is (0, 0.49*(x1 - sin x1)); at x1 = 0.3:
    r = remainder(sysm, [0.3, 0.0], [0.0])
    assert abs(r[0]) < 1e-15
    assert abs(r[1] - 0.49 * (0.3 - math.sin(0.3))) < 1e-15

    strong = strongly_nonlinear()
    # remainder is (x1^3 + x2^5, x1*x2); at (0.2, 0.1): (0.00801, 0.02)
    r = remainder(strong, [0.2, 0.1], [0.0])
    assert abs(r[0] - 0.00801) < 1e-15
    assert abs(r[1] - 0.02) < 1e-15


def test_remainder_zero_at_origin_and_for_linear():
    for sysm in (pendulum(), strongly_nonlinear()):
        assert np.array_equal(
            remainder(sysm, np.zeros(2), np.zeros(1)), np.zeros(2)
        )
    lin = random_linear(3, 2, spectral_radius=0.8, seed=4)
    rng = np.random.default_rng(0)
    X = rng.standard_normal((50, 3))
    U = rng.standard_normal((50, 2))
    assert np.max(np.abs(remainder(lin, X, U))) < 1e-12


def test_pendulum_first_coordinate_is_linear():
    """The angle update x1 + 0.05 x2 has zero remainder everywhere
    (up to one rounding of the dot product)."""
    rng = np.random.default_rng(8)
    X = rng.uniform(-2.0, 2.0, size=(200, 2))
    U = rng.uniform(-2.0, 2.0, size=(200, 1))
    r = remainder(pendulum(), X, U)
    assert np.max(np.abs(r[:, 0])) < 1e-14


def test_remainder_envelope_sampled():
    """|remainder_i(z)| <= (beta + 1e-9) * ||z||_1^2 inside the ball.

    This is the certificate the error bounds rely on; check it on 10^4
    random points per built-in system.
    """
    rng = np.random.default_rng(123)
    for sysm in (pendulum(), strongly_nonlinear()):
        c = sysm.ball_radius
        d = sysm.n + sysm.p
        dirs = rng.standard_exponential((10000, d)) * rng.choice(
            [-1.0, 1.0], size=(10000, d)
        )
        dirs /= np.sum(np.abs(dirs), axis=1, keepdims=True)
        Z = dirs * (c * rng.uniform(0.0, 1.0, size=(10000, 1)))
        r = remainder(sysm, Z[:, : sysm.n], Z[:, sysm.n :])
        l1 = np.sum(np.abs(Z), axis=1)
        assert np.all(
            np.abs(r) <= (sysm.beta + 1e-9) * l1[:, None] ** 2
        ), f"envelope violated for {sysm.name}"
    print("✓ remainder envelope holds on 10000 points per system")


def test_builtin_parameters():
    sysm = pendulum()
    assert np.array_equal(sysm.theta.A, [[1.0, 0.05], [-0.49, 1.0]])
    assert np.array_equal(sysm.theta.B, [[0.0], [0.05]])
    assert np.array_equal(sysm.theta.o, [0.0, 0.0])
    assert sysm.ball_radius == 1.0
    assert abs(sysm.beta - 0.49 / 6.0) < 1e-15

    strong = strongly_nonlinear()
    assert np.array_equal(strong.theta.A, [[0.9, 0.5], [0.0, 0.8]])
    assert np.array_equal(strong.theta.B, [[1.0], [1.0]])
    assert np.array_equal(strong.theta.o, [1.0, 1.0])
    assert strong.ball_radius == 0.5
    assert strong.beta == 0.625


def test_random_linear_properties():
    sysm = random_linear(4, 2, spectral_radius=0.7, seed=9)
    # deterministic in the seed
    again = random_linear(4, 2, spectral_radius=0.7, seed=9)
    assert np.array_equal(sysm.theta.matrix, again.theta.matrix)
    # spectral radius rescaled exactly
    rho = np.max(np.abs(np.linalg.eigvals(sysm.theta.A)))
    assert abs(rho - 0.7) < 1e-12
    assert np.array_equal(sysm.theta.o, np.zeros(4))
    # step is exactly the linear map
    x = np.arange(1.0, 5.0)
    u = np.array([0.5, -0.5])
    want = sysm.theta.A @ x + sysm.theta.B @ u
    assert np.allclose(step(sysm, x, u), want, atol=1e-12)


def test_linear_prediction_batch_matches_loop():
    th = random_linear(3, 2, seed=1).theta
    rng = np.random.default_rng(2)
    X = rng.standard_normal((20, 3))
    U = rng.standard_normal((20, 2))
    batch = linear_prediction(th, X, U)
    for k in range(20):
        assert np.allclose(
            batch[k], linear_prediction(th, X[k], U[k]), atol=1e-14
        )


def test_system_model_validates_offset():
    """A declared offset that disagrees with f(0) is rejected."""
    th = Theta(A=np.eye(1), B=np.ones((1, 1)), o=[0.5])

    def f(X, U):
        return np.atleast_2d(X) + np.atleast_2d(U)  # f(0) = 0 != 0.5

    with pytest.raises(PreconditionViolated):
        SystemModel(name="bad", f=f, theta=th)


def test_system_model_validates_beta():
    """A declared envelope smaller than the true remainder is rejected."""
    th = Theta(A=np.eye(1), B=np.ones((1, 1)), o=[0.0])

    def f(X, U):
        X = np.atleast_2d(X)
        U = np.atleast_2d(U)
        return X + U + X**2  # remainder x^2 needs beta >= 1 on the l1 ball

    with pytest.raises(PreconditionViolated):
        SystemModel(name="bad", f=f, theta=th, ball_radius=1.0, beta=0.01)
    # the honest envelope passes
    SystemModel(name="ok", f=f, theta=th, ball_radius=1.0, beta=1.0)


def test_estimate_beta_builtins():
    # linear systems have zero remainder
    lin = random_linear(2, 1, seed=3)
    assert estimate_beta(lin, c=1.0) == 0.0
    # pendulum: the true supremum on the unit ball is
    # 0.49 * (1 - sin 1) = 0.0776796...; the sampled estimate must come
    # close from below and never exceed the certified 0.49/6
    b = estimate_beta(pendulum(), c=1.0)
    assert 0.49 * (1.0 - math.sin(1.0)) - 1e-6 <= b <= 0.49 / 6.0 + 1e-3
    # strong: certified envelope is 0.625, sampled max is ~0.5
    bs = estimate_beta(strongly_nonlinear(), c=0.5)
    assert 0.0 < bs <= 0.625 + 1e-6


def test_estimate_beta_monotone_in_radius():
    """Larger balls can only increase the sampled envelope (pendulum:
    the boundary ratio 0.49(c - sin c)/c^2 grows with c)."""
    sysm = pendulum()
    vals = [estimate_beta(sysm, c=c) for c in (0.25, 0.5, 0.75, 1.0)]
    assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


def test_estimate_beta_preconditions():
    with pytest.raises(PreconditionViolated):
        estimate_beta(pendulum(), c=0.0)
    with pytest.raises(PreconditionViolated):
        estimate_beta(random_linear(2, 1, seed=0))  # infinite default radius
    with pytest.raises(PreconditionViolated):
        estimate_beta(pendulum(), c=1.0, samples=10)


def test_get_system_registry():
    assert get_system("pendulum").name == "pendulum"
    assert get_system("strong").name == "strong"
    lin = get_system("linear", n=3, p=2, spectral_radius=0.5, seed=11)
    assert lin.n == 3 and lin.p == 2
    with pytest.raises(ConfigInvalid):
        get_system("vanderpol")
    with pytest.raises(ConfigInvalid):
        get_system("pendulum", n=4)
    with pytest.raises(ConfigInvalid):
        get_system("linear", radius=2)


def test_step_shape_errors():
    sysm = pendulum()
    with pytest.raises(DimensionMismatch):
        step(sysm, [0.0, 0.0, 0.0], [0.0])
    with pytest.raises(DimensionMismatch):
        step(sysm, [0.0, 0.0], [0.0, 0.0])
    with pytest.raises(DimensionMismatch):
        step(sysm, [0.0, 0.0], [0.0], [1.0])
