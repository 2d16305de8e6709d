"""System models: nonlinear dynamics plus their linearization at the origin.

A :class:`SystemModel` bundles the true transition map ``f`` with the
linearized parameters ``Theta = [A B o]`` (``o`` is the offset column,
``f(0)``) and a certified quadratic envelope for the linearization
remainder: for every ``z = (x, u)`` with ``||z||_1 < ball_radius``,

    |f(z)_i - (A x + B u + o)_i|  <=  beta * ||z||_1**2    for each i.

Transition maps are batched: ``f(X, U)`` takes ``(N, n)`` states and
``(N, p)`` inputs and returns ``(N, n)`` successor states.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.stats.qmc

from .errors import ConfigInvalid, DimensionMismatch, PreconditionViolated

_CERT_SAMPLES = 1000
_CERT_SEED = 20240817


@dataclass(frozen=True)
class Theta:
    """Linearized parameters ``[A B o]`` of a discrete-time system.

    ``A`` is ``(n, n)``, ``B`` is ``(n, p)`` and ``o`` is the length-``n``
    offset vector (the image of the origin).
    """

    A: np.ndarray
    B: np.ndarray
    o: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        B = np.atleast_2d(np.asarray(self.B, dtype=float))
        o = np.asarray(self.o, dtype=float).reshape(-1)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "o", o)
        n = A.shape[0]
        if A.shape != (n, n):
            raise DimensionMismatch(f"A must be square, got {A.shape}")
        if B.shape[0] != n:
            raise DimensionMismatch(
                f"B has {B.shape[0]} rows, expected {n}"
            )
        if o.shape != (n,):
            raise DimensionMismatch(f"o has shape {o.shape}, expected ({n},)")
        for name, M in (("A", A), ("B", B), ("o", o)):
            if not np.all(np.isfinite(M)):
                raise DimensionMismatch(f"{name} contains non-finite entries")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def p(self) -> int:
        return self.B.shape[1]

    @property
    def matrix(self) -> np.ndarray:
        """The stacked ``(n, n + p + 1)`` parameter matrix ``[A B o]``."""
        return np.hstack([self.A, self.B, self.o[:, None]])

    @classmethod
    def from_matrix(cls, M, n: int, p: int) -> "Theta":
        M = np.asarray(M, dtype=float)
        if M.shape != (n, n + p + 1):
            raise DimensionMismatch(
                f"expected shape ({n}, {n + p + 1}), got {M.shape}"
            )
        return cls(M[:, :n], M[:, n : n + p], M[:, n + p])


def linear_prediction(theta: Theta, x, u) -> np.ndarray:
    """Evaluate ``A x + B u + o`` for a single state or a batch.

    Accepts ``x`` of shape ``(n,)`` or ``(N, n)`` with matching ``u``; the
    result has the same leading shape.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    U = np.atleast_2d(u) if u.ndim > 0 else u.reshape(1, -1)
    if U.ndim == 1:
        U = U[None, :]
    if X.shape[1] != theta.n or U.shape[1] != theta.p:
        raise DimensionMismatch(
            f"state/input widths {X.shape[1]}/{U.shape[1]} do not match "
            f"system dims n={theta.n}, p={theta.p}"
        )
    if X.shape[0] != U.shape[0]:
        raise DimensionMismatch(
            f"batch sizes differ: {X.shape[0]} states vs {U.shape[0]} inputs"
        )
    Y = X @ theta.A.T + U @ theta.B.T + theta.o
    return Y[0] if single else Y


@dataclass(frozen=True)
class SystemModel:
    """A nonlinear system together with its linearization at the origin."""

    name: str
    f: Callable[[np.ndarray, np.ndarray], np.ndarray]
    theta: Theta
    ball_radius: float = np.inf
    beta: float | None = None
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        if self.ball_radius <= 0:
            raise PreconditionViolated("ball_radius must be positive")
        if self.beta is not None and self.beta < 0:
            raise PreconditionViolated("beta must be nonnegative")
        if not self.validate:
            return
        n, p = self.theta.n, self.theta.p
        f0 = np.asarray(
            self.f(np.zeros((1, n)), np.zeros((1, p))), dtype=float
        ).reshape(-1)
        if f0.shape != (n,) or np.max(np.abs(f0 - self.theta.o)) > 1e-12:
            raise PreconditionViolated(
                f"f(0) must equal the offset column o for system {self.name!r}"
            )
        if self.beta is not None:
            self._certify_beta()

    @property
    def n(self) -> int:
        return self.theta.n

    @property
    def p(self) -> int:
        return self.theta.p

    def _certify_beta(self):
        """Spot-check the quadratic remainder envelope on sampled points."""
        n, p = self.n, self.p
        radius = self.ball_radius if np.isfinite(self.ball_radius) else 1.0
        rng = np.random.default_rng(_CERT_SEED)
        d = n + p
        dirs = rng.standard_exponential((_CERT_SAMPLES, d))
        dirs *= rng.integers(0, 2, size=(_CERT_SAMPLES, d)) * 2 - 1
        dirs /= np.sum(np.abs(dirs), axis=1, keepdims=True)
        Z = dirs * (radius * rng.uniform(0.0, 1.0, size=(_CERT_SAMPLES, 1)))
        r = remainder(self, Z[:, :n], Z[:, n:])
        l1 = np.sum(np.abs(Z), axis=1)
        if np.any(np.abs(r) > (self.beta + 1e-9) * l1[:, None] ** 2):
            raise PreconditionViolated(
                f"declared beta={self.beta} does not dominate the "
                f"linearization remainder of system {self.name!r}"
            )


def step(sys: SystemModel, x, u, w=None) -> np.ndarray:
    """One transition ``x+ = f(x, u) + w`` for a single state/input pair."""
    x = np.asarray(x, dtype=float).reshape(-1)
    u = np.asarray(u, dtype=float).reshape(-1)
    if x.shape != (sys.n,) or u.shape != (sys.p,):
        raise DimensionMismatch(
            f"expected state ({sys.n},) and input ({sys.p},), "
            f"got {x.shape} and {u.shape}"
        )
    nxt = np.asarray(sys.f(x[None, :], u[None, :]), dtype=float)[0]
    if w is not None:
        w = np.asarray(w, dtype=float).reshape(-1)
        if w.shape != (sys.n,):
            raise DimensionMismatch(f"noise has shape {w.shape}")
        nxt = nxt + w
    return nxt


def remainder(sys: SystemModel, x, u) -> np.ndarray:
    """Linearization remainder ``f(x, u) - (A x + B u + o)``.

    Works on a single pair or a batch, mirroring the input shape.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    U = np.asarray(u, dtype=float)
    if U.ndim == 1 and not single:
        raise DimensionMismatch("batch states require batch inputs")
    U = np.atleast_2d(U)
    lin = linear_prediction(sys.theta, X, U)
    r = np.asarray(sys.f(X, U), dtype=float) - lin
    return r[0] if single else r


def estimate_beta(
    sys: SystemModel, c: float | None = None, samples: int = 10000
) -> float:
    """Numerically estimate the quadratic remainder envelope on an l1 ball.

    Evaluates ``max_i |remainder(z)_i| / ||z||_1**2`` over a deterministic
    point set of at least ``samples`` quasi-random interior points plus a
    boundary sweep (signed axes and seeded l1-sphere directions at ten
    radii up to ``c``), and returns the maximum ratio.  This is a sampled
    lower estimate of the true supremum; inflate it before using it as a
    certified envelope.
    """
    if c is None:
        c = sys.ball_radius
    if not np.isfinite(c) or c <= 0:
        raise PreconditionViolated("radius c must be finite and positive")
    if samples < 1000:
        raise PreconditionViolated("samples must be at least 1000")
    n, p = sys.n, sys.p
    d = n + p
    rng = np.random.default_rng(_CERT_SEED)
    dirs = rng.standard_exponential((512, d))
    dirs *= rng.integers(0, 2, size=dirs.shape) * 2 - 1
    dirs /= np.sum(np.abs(dirs), axis=1, keepdims=True)
    axes = np.vstack([np.eye(d), -np.eye(d)])
    dirs = np.vstack([axes, dirs])
    radii = c * np.array(
        [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0 - 1e-9]
    )
    boundary = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, d)
    halton = scipy.stats.qmc.Halton(d=d + 1, scramble=True, seed=_CERT_SEED)
    U = halton.random(samples)
    raw = U[:, :d] * 2.0 - 1.0
    nrm = np.sum(np.abs(raw), axis=1)
    keep = nrm > 1e-12
    interior = (raw[keep] / nrm[keep, None]) * (
        c * (1.0 - 1e-9) * U[keep, d:]
    )
    Z = np.vstack([boundary, interior])
    l1 = np.sum(np.abs(Z), axis=1)
    pos = l1 > 0
    Z, l1 = Z[pos], l1[pos]
    r = remainder(sys, Z[:, :n], Z[:, n:])
    return float(np.max(np.abs(r) / l1[:, None] ** 2))


# ---------------------------------------------------------------------------
# Built-in systems


def pendulum() -> SystemModel:
    """Euler-discretized damped pendulum with torque input.

    State ``(angle, angular velocity)``, one input.  The only nonlinearity
    is ``sin`` in the velocity update, so the remainder envelope on the
    unit l1 ball is ``beta = 0.49 / 6`` (from the cubic term of ``sin``).
    """
    A = np.array([[1.0, 0.05], [-0.49, 1.0]])
    B = np.array([[0.0], [0.05]])
    o = np.zeros(2)

    def f(X, U):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        U = np.atleast_2d(np.asarray(U, dtype=float))
        x1, x2 = X[:, 0], X[:, 1]
        return np.column_stack(
            [x1 + 0.05 * x2, -0.49 * np.sin(x1) + x2 + 0.05 * U[:, 0]]
        )

    return SystemModel(
        name="pendulum",
        f=f,
        theta=Theta(A, B, o),
        ball_radius=1.0,
        beta=0.49 / 6.0,
    )


def strongly_nonlinear() -> SystemModel:
    """Unstable system with polynomial nonlinearities and a constant drift.

    The remainder ``(x1**3 + x2**5, x1 * x2)`` obeys the envelope
    ``beta = 0.625`` on the l1 ball of radius ``0.5``; outside that ball
    trajectories blow up quickly.
    """
    A = np.array([[0.9, 0.5], [0.0, 0.8]])
    B = np.array([[1.0], [1.0]])
    o = np.array([1.0, 1.0])

    def f(X, U):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        U = np.atleast_2d(np.asarray(U, dtype=float))
        x1, x2 = X[:, 0], X[:, 1]
        u = U[:, 0]
        return np.column_stack(
            [
                0.9 * x1 + 0.5 * x2 + u + x1**3 + x2**5 + 1.0,
                0.8 * x2 + u + x1 * x2 + 1.0,
            ]
        )

    return SystemModel(
        name="strong",
        f=f,
        theta=Theta(A, B, o),
        ball_radius=0.5,
        beta=0.625,
    )


def linear_system(
    theta: Theta, name: str = "linear"
) -> SystemModel:
    """Wrap known linear parameters as a system (zero remainder)."""

    def f(X, U):
        return linear_prediction(theta, np.atleast_2d(X), np.atleast_2d(U))

    return SystemModel(
        name=name, f=f, theta=theta, ball_radius=np.inf, beta=0.0
    )


def random_linear(
    n: int, p: int, spectral_radius: float = 0.9, seed: int = 0
) -> SystemModel:
    """Random linear system with the spectral radius of ``A`` rescaled.

    Entries of ``A`` and ``B`` are drawn i.i.d. standard normal from a
    generator seeded with ``seed``; ``A`` is then scaled so its spectral
    radius equals ``spectral_radius``.  The offset is zero, so the
    linearization is exact (``beta = 0``).
    """
    if n < 1 or p < 1:
        raise PreconditionViolated("n and p must be positive")
    if spectral_radius < 0:
        raise PreconditionViolated("spectral_radius must be nonnegative")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n))
    B = rng.standard_normal((n, p))
    rho = float(np.max(np.abs(np.linalg.eigvals(A))))
    A = A * (spectral_radius / rho) if rho > 0 else A * 0.0
    return linear_system(Theta(A, B, np.zeros(n)), name="linear")


def get_system(name: str, **options) -> SystemModel:
    """Construct a built-in system by registry name.

    ``"pendulum"`` and ``"strong"`` take no options; ``"linear"`` accepts
    ``n``, ``p``, ``spectral_radius`` and ``seed``.
    """
    if name == "pendulum":
        extra = set(options)
    elif name == "strong":
        extra = set(options)
    elif name == "linear":
        allowed = {"n", "p", "spectral_radius", "seed"}
        extra = set(options) - allowed
        if not extra:
            return random_linear(
                n=int(options.get("n", 2)),
                p=int(options.get("p", 1)),
                spectral_radius=float(options.get("spectral_radius", 0.9)),
                seed=int(options.get("seed", 0)),
            )
    else:
        raise ConfigInvalid(
            f"unknown system {name!r}; expected pendulum, strong or linear"
        )
    if extra:
        raise ConfigInvalid(
            f"unsupported options for system {name!r}: {sorted(extra)}"
        )
    return pendulum() if name == "pendulum" else strongly_nonlinear()
