"""Seeded randomness: process-noise draws and exploration inputs.

All randomness in the package flows through a :class:`SeedPolicy`, which
derives independent child generators from one master seed via
``numpy.random.SeedSequence`` spawn keys.  Replaying the same policy and
key gives bit-identical draws, and batch draws are defined to equal the
corresponding sequence of single draws from the same generator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionViolated

NOISE_KINDS = ("gaussian", "uniform", "none")


@dataclass(frozen=True)
class NoiseSpec:
    """Process-noise distribution: i.i.d. across time and coordinates.

    ``gaussian`` draws ``N(0, sigma_w**2)`` per coordinate; ``uniform``
    draws from ``[-sigma_w*sqrt(3), sigma_w*sqrt(3)]`` (same variance and
    the same sub-Gaussian parameter ``sigma_w``); ``none`` is exactly zero
    and consumes no random numbers.
    """

    kind: str = "gaussian"
    sigma_w: float = 0.5

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise PreconditionViolated(
                f"noise kind must be one of {NOISE_KINDS}, got {self.kind!r}"
            )
        if self.sigma_w < 0:
            raise PreconditionViolated("sigma_w must be nonnegative")

    @property
    def effective_sigma(self) -> float:
        """Sub-Gaussian parameter fed to the error bounds (0 for ``none``)."""
        return 0.0 if self.kind == "none" else self.sigma_w


@dataclass(frozen=True)
class SeedPolicy:
    """Derives reproducible, statistically independent generator streams."""

    master_seed: int

    def stream(self, *key: int) -> np.random.Generator:
        """Generator for the substream identified by ``key``.

        Streams with distinct keys are independent; calling again with the
        same key restarts the identical stream.
        """
        ss = np.random.SeedSequence(self.master_seed, spawn_key=tuple(key))
        return np.random.default_rng(ss)


def draw_noise_batch(
    spec: NoiseSpec, count: int, dim: int, rng: np.random.Generator
) -> np.ndarray:
    """``count`` consecutive noise vectors of width ``dim`` as ``(count, dim)``.

    Row ``k`` equals the ``k``-th single draw from the same generator state.
    ``none`` returns zeros without advancing the generator.
    """
    if count < 0 or dim < 1:
        raise PreconditionViolated("count must be >= 0 and dim >= 1")
    if spec.kind == "none" or spec.sigma_w == 0.0:
        return np.zeros((count, dim))
    if spec.kind == "gaussian":
        return spec.sigma_w * rng.standard_normal((count, dim))
    half = spec.sigma_w * np.sqrt(3.0)
    return rng.uniform(-half, half, size=(count, dim))


def draw_noise(
    spec: NoiseSpec, dim: int, rng: np.random.Generator
) -> np.ndarray:
    """A single noise vector of width ``dim``."""
    return draw_noise_batch(spec, 1, dim, rng)[0]


def draw_input_batch(
    sigma_u: float, count: int, dim: int, rng: np.random.Generator
) -> np.ndarray:
    """``count`` exploration inputs ``N(0, sigma_u**2 I_dim)`` as rows.

    ``sigma_u = 0`` returns zeros without advancing the generator.
    """
    if sigma_u < 0:
        raise PreconditionViolated("sigma_u must be nonnegative")
    if count < 0 or dim < 1:
        raise PreconditionViolated("count must be >= 0 and dim >= 1")
    if sigma_u == 0.0:
        return np.zeros((count, dim))
    return sigma_u * rng.standard_normal((count, dim))


def draw_input(sigma_u: float, dim: int, rng: np.random.Generator) -> np.ndarray:
    """A single exploration input vector."""
    return draw_input_batch(sigma_u, 1, dim, rng)[0]
