"""Data acquisition: deterministic restarts and single-trajectory rollouts.

Two regimes produce the regression dataset ``{(x0, u0, x1)}``:

* ``collect_multi`` — many length-one experiments.  Experiment ``i``
  (1-based) restarts the system at ``z0 = s * q * e_j`` where ``e_j``
  cycles through the ``n + p`` coordinate axes of ``z = (x, u)`` and the
  sign ``s`` flips after every full cycle.  Every restart satisfies
  ``||z0||_1 = q`` exactly, and the regressor Gram matrix becomes block
  diagonal with known eigenvalue bounds.

* ``collect_single`` — one trajectory from the origin driven by Gaussian
  exploration inputs, recording consecutive transitions.  Unstable systems
  may blow up; collection stops at a configurable magnitude cap and the
  divergence step is recorded.

Datasets round-trip through a CSV format whose first line is a ``#``
comment carrying the generation metadata (seed, system, regime knobs).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import SystemModel, linear_prediction
from .errors import DimensionMismatch, PreconditionViolated
from .noise import NoiseSpec, SeedPolicy, draw_input_batch, draw_noise_batch

DEFAULT_DIVERGENCE_CAP = 1e6


def initial_condition(i: int, q: float, n: int, p: int) -> np.ndarray:
    """Restart point ``z0`` for experiment ``i`` (1-based).

    Cycles through ``+q e_1, ..., +q e_{n+p}, -q e_1, ..., -q e_{n+p}``
    and repeats; the first ``n`` coordinates are the state, the last ``p``
    the input.
    """
    if i < 1:
        raise PreconditionViolated("experiment index i is 1-based")
    if q <= 0:
        raise PreconditionViolated("q must be positive")
    d = n + p
    j = i % d
    if j == 0:
        j = d
    s = 1.0 if ((i - 1) // d) % 2 == 0 else -1.0
    z = np.zeros(d)
    z[j - 1] = s * q
    return z


def initial_conditions(N: int, q: float, n: int, p: int) -> np.ndarray:
    """Stack of the first ``N`` restart points, shape ``(N, n + p)``."""
    if N < 0:
        raise PreconditionViolated("N must be nonnegative")
    if q <= 0:
        raise PreconditionViolated("q must be positive")
    d = n + p
    i = np.arange(1, N + 1)
    j = i % d
    j = np.where(j == 0, d, j)
    s = np.where(((i - 1) // d) % 2 == 0, 1.0, -1.0)
    Z = np.zeros((N, d))
    Z[np.arange(N), j - 1] = s * q
    return Z


@dataclass
class Dataset:
    """Transition samples plus the metadata needed to regenerate them."""

    x0: np.ndarray
    u0: np.ndarray
    x1: np.ndarray
    system: str = ""
    mode: str = "multi_traj"
    master_seed: int | None = None
    trial: int | None = None
    noise_kind: str = "gaussian"
    sigma_w: float = 0.0
    q: float | None = None
    sigma_u: float | None = None
    divergence_cap: float | None = None
    diverged_at: int | None = None
    requested_N: int | None = field(default=None)

    def __post_init__(self):
        self.x0 = np.atleast_2d(np.asarray(self.x0, dtype=float))
        self.u0 = np.atleast_2d(np.asarray(self.u0, dtype=float))
        self.x1 = np.atleast_2d(np.asarray(self.x1, dtype=float))
        N = self.x0.shape[0]
        if self.u0.shape[0] != N or self.x1.shape[0] != N:
            raise DimensionMismatch(
                "x0, u0 and x1 must have the same number of rows"
            )
        if self.x1.shape[1] != self.x0.shape[1]:
            raise DimensionMismatch("x0 and x1 must have the same width")
        for name, M in (("x0", self.x0), ("u0", self.u0), ("x1", self.x1)):
            if N and not np.all(np.isfinite(M)):
                raise DimensionMismatch(f"{name} contains non-finite entries")
        if self.requested_N is None:
            self.requested_N = N

    def __len__(self) -> int:
        return self.x0.shape[0]

    @property
    def n(self) -> int:
        return self.x0.shape[1]

    @property
    def p(self) -> int:
        return self.u0.shape[1]

    def metadata(self) -> dict:
        """Generation metadata as an ordered, scalar-valued mapping."""
        meta: dict = {
            "system": self.system,
            "mode": self.mode,
            "n": self.n,
            "p": self.p,
            "N": len(self),
            "requested_N": self.requested_N,
            "noise_kind": self.noise_kind,
            "sigma_w": self.sigma_w,
        }
        if self.q is not None:
            meta["q"] = self.q
        if self.sigma_u is not None:
            meta["sigma_u"] = self.sigma_u
        if self.master_seed is not None:
            meta["master_seed"] = self.master_seed
        if self.trial is not None:
            meta["trial"] = self.trial
        if self.divergence_cap is not None:
            meta["divergence_cap"] = self.divergence_cap
        if self.diverged_at is not None:
            meta["diverged_at"] = self.diverged_at
        return meta


def _warn_if_undersampled(N: int, n: int, p: int):
    lo = 4 * (n + p)
    if N < lo:
        warnings.warn(
            f"N={N} is below 4(n+p)={lo}; the finite-sample error bounds "
            "do not apply",
            UserWarning,
            stacklevel=3,
        )


def collect_multi(
    sys: SystemModel,
    q: float,
    N: int,
    noise: NoiseSpec,
    seeds: SeedPolicy,
    trial: int = 0,
) -> Dataset:
    """Run ``N`` single-step restart experiments and return the dataset.

    Sample ``i`` starts at the deterministic restart point and records its
    noisy successor ``x1 = f(x0, u0) + w``.  Process noise is drawn as one
    ``(N, n)`` batch from the trial's substream.
    """
    if N < 1:
        raise PreconditionViolated("N must be positive")
    n, p = sys.n, sys.p
    _warn_if_undersampled(N, n, p)
    Z0 = initial_conditions(N, q, n, p)
    x0, u0 = Z0[:, :n], Z0[:, n:]
    rng = seeds.stream(trial)
    W = draw_noise_batch(noise, N, n, rng)
    x1 = np.asarray(sys.f(x0, u0), dtype=float) + W
    return Dataset(
        x0=x0,
        u0=u0,
        x1=x1,
        system=sys.name,
        mode="multi_traj",
        master_seed=seeds.master_seed,
        trial=trial,
        noise_kind=noise.kind,
        sigma_w=noise.sigma_w,
        q=q,
    )


def collect_single(
    sys: SystemModel,
    sigma_u: float,
    N: int,
    noise: NoiseSpec,
    seeds: SeedPolicy,
    trial: int = 0,
    divergence_cap: float = DEFAULT_DIVERGENCE_CAP,
) -> tuple[Dataset, int | None]:
    """Roll out one trajectory from the origin and record transitions.

    Inputs are ``N(0, sigma_u**2 I)``; the trial substream is consumed as
    one ``(N, p)`` input batch followed by one ``(N, n)`` noise batch.  If
    any successor coordinate exceeds ``divergence_cap`` in magnitude (or is
    non-finite) at step ``k``, collection stops with the first ``k``
    samples and returns ``diverged_at = k``; otherwise ``diverged_at`` is
    ``None``.
    """
    if N < 1:
        raise PreconditionViolated("N must be positive")
    if divergence_cap <= 0:
        raise PreconditionViolated("divergence_cap must be positive")
    n, p = sys.n, sys.p
    _warn_if_undersampled(N, n, p)
    rng = seeds.stream(trial)
    U = draw_input_batch(sigma_u, N, p, rng)
    W = draw_noise_batch(noise, N, n, rng)
    x0 = np.zeros((N, n))
    x1 = np.zeros((N, n))
    x = np.zeros(n)
    diverged_at: int | None = None
    kept = N
    for k in range(N):
        nxt = np.asarray(sys.f(x[None, :], U[k][None, :]), dtype=float)[0]
        nxt = nxt + W[k]
        if not np.all(np.isfinite(nxt)) or np.max(np.abs(nxt)) > divergence_cap:
            diverged_at = k
            kept = k
            break
        x0[k] = x
        x1[k] = nxt
        x = nxt
    ds = Dataset(
        x0=x0[:kept],
        u0=U[:kept],
        x1=x1[:kept],
        system=sys.name,
        mode="single_traj",
        master_seed=seeds.master_seed,
        trial=trial,
        noise_kind=noise.kind,
        sigma_w=noise.sigma_w,
        sigma_u=sigma_u,
        divergence_cap=divergence_cap,
        diverged_at=diverged_at,
        requested_N=N,
    )
    return ds, diverged_at


def realized_disturbances(
    sys: SystemModel, ds: Dataset
) -> tuple[np.ndarray, np.ndarray]:
    """Recover the noise and remainder realizations behind a dataset.

    Returns ``(W, R)`` with shape ``(n, N)`` each, satisfying
    ``x1.T = Theta @ [x0 u0 1].T + W + R`` up to rounding: ``W`` is
    ``x1 - f(x0, u0)`` (the recorded noise, exactly) and ``R`` is the
    linearization remainder at each sample.
    """
    if sys.n != ds.n or sys.p != ds.p:
        raise DimensionMismatch("system and dataset dimensions differ")
    fval = np.asarray(sys.f(ds.x0, ds.u0), dtype=float)
    W = (ds.x1 - fval).T
    R = (fval - linear_prediction(sys.theta, ds.x0, ds.u0)).T
    return W, R


# ---------------------------------------------------------------------------
# CSV serialization


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _meta_line(meta: dict) -> str:
    return "# " + " ".join(f"{k}={v}" for k, v in meta.items())


def dataset_csv_text(ds: Dataset) -> str:
    """Dataset as CSV text: ``#`` metadata line, column header, one row
    per sample (floats printed with 17 significant digits so they
    round-trip exactly)."""
    n, p = ds.n, ds.p
    cols = (
        ["idx"]
        + [f"x0_{j + 1}" for j in range(n)]
        + [f"u0_{j + 1}" for j in range(p)]
        + [f"x1_{j + 1}" for j in range(n)]
    )
    lines = [_meta_line(ds.metadata()), ",".join(cols)]
    for k in range(len(ds)):
        row = [str(k)]
        row += [_fmt(v) for v in ds.x0[k]]
        row += [_fmt(v) for v in ds.u0[k]]
        row += [_fmt(v) for v in ds.x1[k]]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def write_dataset_csv(ds: Dataset, path) -> None:
    """Write the dataset CSV plus a sidecar ``<path>.meta`` file that
    repeats the metadata one ``key=value`` pair per line."""
    path = Path(path)
    path.write_text(dataset_csv_text(ds))
    side = path.with_name(path.name + ".meta")
    side.write_text(
        "".join(f"{k}={v}\n" for k, v in ds.metadata().items())
    )


def _parse_meta(text: str) -> dict:
    meta = {}
    for tok in text.split():
        if "=" in tok:
            k, _, v = tok.partition("=")
            meta[k] = v
    return meta


def read_dataset_csv(path) -> Dataset:
    """Read a dataset written by :func:`write_dataset_csv`."""
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    if not lines:
        raise DimensionMismatch(f"{path} is empty")
    meta: dict = {}
    if lines[0].startswith("#"):
        meta = _parse_meta(lines[0][1:])
        lines = lines[1:]
    if not lines:
        raise DimensionMismatch(f"{path} has no column header")
    cols = lines[0].split(",")
    n = sum(c.startswith("x0_") for c in cols)
    p = sum(c.startswith("u0_") for c in cols)
    if n == 0 or cols[0] != "idx" or sum(c.startswith("x1_") for c in cols) != n:
        raise DimensionMismatch(f"{path} has an unrecognized column header")
    rows = [ln.split(",") for ln in lines[1:]]
    data = np.array([[float(v) for v in r[1:]] for r in rows], dtype=float)
    if rows and data.shape[1] != n + p + n:
        raise DimensionMismatch(f"{path} rows do not match the header width")
    if not rows:
        data = np.zeros((0, 2 * n + p))
    x0, u0, x1 = data[:, :n], data[:, n : n + p], data[:, n + p :]

    def _get(key, cast, default=None):
        return cast(meta[key]) if key in meta else default

    return Dataset(
        x0=x0,
        u0=u0,
        x1=x1,
        system=_get("system", str, ""),
        mode=_get("mode", str, "multi_traj"),
        master_seed=_get("master_seed", int),
        trial=_get("trial", int),
        noise_kind=_get("noise_kind", str, "gaussian"),
        sigma_w=_get("sigma_w", float, 0.0),
        q=_get("q", float),
        sigma_u=_get("sigma_u", float),
        divergence_cap=_get("divergence_cap", float),
        diverged_at=_get("diverged_at", int),
        requested_N=_get("requested_N", int),
    )
