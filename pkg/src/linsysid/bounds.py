"""Computable finite-sample error bounds for the restart-based estimator.

All quantities are closed-form functions of problem dimensions and knobs:
no data is needed.  The total bound on ``||theta_hat - theta||`` (spectral
norm, confidence ``1 - delta``) splits into three terms:

* a noise term, from sub-Gaussian concentration of ``W Z.T`` against the
  guaranteed excitation of the restart scheme,
* a nonlinearity term, proportional to the remainder envelope ``beta``,
* a regularization term, the bias introduced by ``lam > 0``.

Validity preconditions (enough samples, ``q`` small enough for the
excitation guarantee and inside the model-validity ball) are carried as
flags so a caller can still inspect the numbers outside the guaranteed
regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionViolated


def _validate_dims(n: int, p: int, N: int):
    if n < 1 or p < 1:
        raise PreconditionViolated("n and p must be positive integers")
    if N < 1:
        raise PreconditionViolated("N must be a positive integer")


def gram_eigenvalue_bounds(
    n: int, p: int, N: int, q: float
) -> tuple[float, float]:
    """Deterministic eigenvalue envelope of the restart-scheme Gram matrix.

    For ``N >= 4(n+p)`` experiments at excitation ``q <= sqrt(n+p)``, every
    eigenvalue of ``Z Z.T`` lies in ``[lower, upper]`` with

        lower = N * min(q**2 / (2(n+p)), 1/2)
        upper = N * max(2 q**2 / (n+p), 2)

    Raises :class:`PreconditionViolated` outside that regime.
    """
    _validate_dims(n, p, N)
    d = n + p
    if q <= 0:
        raise PreconditionViolated("q must be positive")
    if N < 4 * d:
        raise PreconditionViolated(f"need N >= 4(n+p) = {4 * d}, got N={N}")
    if q > math.sqrt(d) * (1 + 1e-12):
        raise PreconditionViolated(
            f"need q <= sqrt(n+p) = {math.sqrt(d):.6g}, got q={q}"
        )
    lower = N * min(q * q / (2.0 * d), 0.5)
    upper = N * max(2.0 * q * q / d, 2.0)
    return lower, upper


def noise_concentration_bound(
    n: int,
    p: int,
    N: int,
    q: float,
    lam: float,
    delta: float,
    sigma_w: float,
) -> float:
    """High-probability envelope for the noise correlation ``||W Z.T||``
    relative to the regularized Gram scale.

    Evaluates ``3 sigma_w sqrt(n log 9 - log delta
    + (n+p+1) log(1 + 4(n+p)/(q**2 + zeta)))`` with
    ``zeta = 4 lam (n+p) / N``; holds with probability ``1 - delta`` for
    sub-Gaussian noise with parameter ``sigma_w``.
    """
    _validate_dims(n, p, N)
    if q <= 0:
        raise PreconditionViolated("q must be positive")
    if lam < 0:
        raise PreconditionViolated("lam must be nonnegative")
    if not 0.0 < delta < 1.0:
        raise PreconditionViolated("delta must be in (0, 1)")
    if sigma_w < 0:
        raise PreconditionViolated("sigma_w must be nonnegative")
    d = n + p
    zeta = 4.0 * lam * d / N
    inner = (
        n * math.log(9.0)
        - math.log(delta)
        + (d + 1) * math.log1p(4.0 * d / (q * q + zeta))
    )
    return 3.0 * sigma_w * math.sqrt(inner)


def nonlinearity_error_bound(
    n: int, p: int, N: int, q: float, lam: float, beta: float
) -> float:
    """Worst-case contribution of the linearization remainder to the
    estimation error.

    With ``gamma = lam (n+p) / (N q**2)``:

        sqrt(2 beta**2 (n**2 + n p) / (1 + gamma)) * q
        + 2 (n+p) sqrt(lam N n beta**2 q**4) / (N q**2 + 2 lam (n+p))
    """
    _validate_dims(n, p, N)
    if q <= 0:
        raise PreconditionViolated("q must be positive")
    if lam < 0:
        raise PreconditionViolated("lam must be nonnegative")
    if beta < 0:
        raise PreconditionViolated("beta must be nonnegative")
    d = n + p
    gamma = lam * d / (N * q * q)
    first = math.sqrt(2.0 * beta * beta * (n * n + n * p) / (1.0 + gamma)) * q
    second = (
        2.0
        * d
        * math.sqrt(lam * N * n * beta * beta * q**4)
        / (N * q * q + 2.0 * lam * d)
    )
    return first + second


@dataclass(frozen=True)
class BoundInputs:
    """Everything the total error bound depends on.

    ``theta_norm`` is (an upper bound on) ``||theta||``; ``ball_radius``
    is the radius ``c`` on which ``beta`` certifies the remainder
    (``inf`` when the envelope holds globally).
    """

    n: int
    p: int
    N: int
    q: float
    lam: float
    delta: float
    sigma_w: float
    beta: float
    theta_norm: float
    ball_radius: float = np.inf

    def __post_init__(self):
        _validate_dims(self.n, self.p, self.N)
        if self.q <= 0:
            raise PreconditionViolated("q must be positive")
        if self.lam < 0:
            raise PreconditionViolated("lam must be nonnegative")
        if not 0.0 < self.delta < 1.0:
            raise PreconditionViolated("delta must be in (0, 1)")
        for name in ("sigma_w", "beta", "theta_norm"):
            if getattr(self, name) < 0:
                raise PreconditionViolated(f"{name} must be nonnegative")
        if self.ball_radius <= 0:
            raise PreconditionViolated("ball_radius must be positive")

    @property
    def sample_count_ok(self) -> bool:
        return self.N >= 4 * (self.n + self.p)

    @property
    def excitation_ok(self) -> bool:
        return self.q <= math.sqrt(self.n + self.p) * (1 + 1e-12)

    @property
    def inside_ball(self) -> bool:
        return self.q < self.ball_radius

    @property
    def valid(self) -> bool:
        """All preconditions of the total bound hold."""
        return self.sample_count_ok and self.excitation_ok and self.inside_ball


@dataclass(frozen=True)
class BoundReport:
    """The three bound terms, their sum, and the validity flag."""

    noise_term: float
    nonlin_term: float
    reg_term: float
    total: float
    valid: bool
    inputs: BoundInputs


def total_error_bound(inputs: BoundInputs) -> BoundReport:
    """Total high-confidence bound on the estimation error.

    With probability at least ``1 - delta`` over the noise, the restart
    scheme with ``N`` experiments at excitation ``q`` yields

        ||theta_hat - theta||  <=  noise_term + nonlin_term + reg_term

    where (``d = n + p``, ``gamma = lam d / (N q**2)``):

        noise_term  = 5 sigma_w sqrt(n log 9 - log delta
                        + (d+1) log(1 + 4 d / q**2))
                        / sqrt(N q**2 / d + lam)
        nonlin_term = sqrt(2 (n**2 + n p) / (1 + gamma)) * beta * q
        reg_term    = 2 d (lam theta_norm + sqrt(lam N n beta**2 q**4))
                        / (2 lam d + N q**2)

    The numbers are computed even when ``inputs.valid`` is ``False``; the
    guarantee only holds when the flag is set.
    """
    n, p, N, q = inputs.n, inputs.p, inputs.N, inputs.q
    lam, delta = inputs.lam, inputs.delta
    d = n + p
    gamma = lam * d / (N * q * q)
    inner = (
        n * math.log(9.0)
        - math.log(delta)
        + (d + 1) * math.log1p(4.0 * d / (q * q))
    )
    noise = (
        5.0
        * inputs.sigma_w
        * math.sqrt(inner)
        / math.sqrt(N * q * q / d + lam)
    )
    nonlin = (
        math.sqrt(2.0 * (n * n + n * p) / (1.0 + gamma)) * inputs.beta * q
    )
    reg = (
        2.0
        * d
        * (
            lam * inputs.theta_norm
            + math.sqrt(lam * N * n * inputs.beta**2 * q**4)
        )
        / (2.0 * lam * d + N * q * q)
    )
    return BoundReport(
        noise_term=noise,
        nonlin_term=nonlin,
        reg_term=reg,
        total=noise + nonlin + reg,
        valid=inputs.valid,
        inputs=inputs,
    )


BOUND_COLUMNS = (
    "n,p,N,q,lambda,delta,sigma_w,beta,theta_norm,"
    "noise_term,nonlin_term,reg_term,total,valid"
)


def bound_csv_text(report: BoundReport) -> str:
    """One-row CSV serialization of a bound report."""
    i = report.inputs

    def g(x: float) -> str:
        return f"{float(x):.17g}"

    row = [
        str(i.n),
        str(i.p),
        str(i.N),
        g(i.q),
        g(i.lam),
        g(i.delta),
        g(i.sigma_w),
        g(i.beta),
        g(i.theta_norm),
        g(report.noise_term),
        g(report.nonlin_term),
        g(report.reg_term),
        g(report.total),
        "1" if report.valid else "0",
    ]
    return BOUND_COLUMNS + "\n" + ",".join(row) + "\n"
