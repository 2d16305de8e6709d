"""Experiment harness: parameter sweeps over (excitation, sample count).

A sweep runs ``trials`` independent repetitions of acquire-then-fit for
every cell of a ``param x N`` grid, where ``param`` is the restart
excitation ``q`` (multi-trajectory regime) or the exploration input level
``sigma_u`` (single-trajectory regime).  Trial ``t`` always uses the seed
substream keyed by ``t`` alone, so the same noise realizations are shared
across cells (common random numbers) and every cell's numbers are
independent of which other cells run.

Results are written as CSV with a leading ``#`` metadata line that echoes
the master seed and all knobs, so a sweep is reproducible from its output
file alone.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .acquisition import collect_multi, collect_single
from .bounds import BoundInputs, total_error_bound
from .dynamics import SystemModel, get_system
from .errors import ConfigInvalid, SingularGram
from .estimator import assemble, estimation_error, fit
from .noise import NOISE_KINDS, NoiseSpec, SeedPolicy
from .numerics import spectral_norm

MODES = ("multi_traj", "single_traj")


@dataclass(frozen=True)
class ExperimentConfig:
    """Frozen description of one sweep."""

    system: str
    mode: str
    N_list: tuple[int, ...]
    q_list: tuple[float, ...] = ()
    sigma_u_list: tuple[float, ...] = ()
    lam: float = 0.0
    delta: float = 0.1
    trials: int = 10
    master_seed: int = 0
    noise_kind: str = "gaussian"
    sigma_w: float = 0.5
    divergence_cap: float = 1e6
    system_options: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "N_list", tuple(int(v) for v in self.N_list))
        object.__setattr__(
            self, "q_list", tuple(float(v) for v in self.q_list)
        )
        object.__setattr__(
            self,
            "sigma_u_list",
            tuple(float(v) for v in self.sigma_u_list),
        )
        if self.mode not in MODES:
            raise ConfigInvalid(f"mode must be one of {MODES}")
        if self.noise_kind not in NOISE_KINDS:
            raise ConfigInvalid(f"noise_kind must be one of {NOISE_KINDS}")
        if not self.N_list or any(N < 1 for N in self.N_list):
            raise ConfigInvalid("N_list must contain positive integers")
        if self.mode == "multi_traj":
            if not self.q_list:
                raise ConfigInvalid("multi_traj sweeps need q_list")
            if self.sigma_u_list:
                raise ConfigInvalid("sigma_u_list is for single_traj sweeps")
            if any(q <= 0 for q in self.q_list):
                raise ConfigInvalid("q values must be positive")
        else:
            if not self.sigma_u_list:
                raise ConfigInvalid("single_traj sweeps need sigma_u_list")
            if self.q_list:
                raise ConfigInvalid("q_list is for multi_traj sweeps")
            if any(s < 0 for s in self.sigma_u_list):
                raise ConfigInvalid("sigma_u values must be nonnegative")
        if self.trials < 1:
            raise ConfigInvalid("trials must be positive")
        if self.lam < 0:
            raise ConfigInvalid("lambda must be nonnegative")
        if not 0.0 < self.delta < 1.0:
            raise ConfigInvalid("delta must be in (0, 1)")
        if self.sigma_w < 0:
            raise ConfigInvalid("sigma_w must be nonnegative")
        if self.divergence_cap <= 0:
            raise ConfigInvalid("divergence_cap must be positive")

    @property
    def params(self) -> tuple[float, ...]:
        return self.q_list if self.mode == "multi_traj" else self.sigma_u_list


_CONFIG_KEYS = frozenset(
    {
        "system",
        "mode",
        "N_list",
        "q_list",
        "sigma_u_list",
        "lambda",
        "delta",
        "trials",
        "master_seed",
        "noise_kind",
        "sigma_w",
        "divergence_cap",
        "linear_n",
        "linear_p",
        "linear_radius",
        "linear_seed",
    }
)


def parse_config(text: str) -> ExperimentConfig:
    """Parse a flat ``key = value`` config (``#`` comments, blank lines ok).

    Unknown keys are an error; list values are comma separated.
    """
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigInvalid(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigInvalid(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigInvalid(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigInvalid(f"line {lineno}: empty value for {key!r}")
        raw[key] = value
    for req in ("system", "mode", "N_list"):
        if req not in raw:
            raise ConfigInvalid(f"missing required key {req!r}")

    def _floats(s):
        return tuple(float(v) for v in s.split(","))

    def _ints(s):
        out = []
        for v in s.split(","):
            f = float(v)
            if f != int(f):
                raise ConfigInvalid(f"expected integer, got {v.strip()!r}")
            out.append(int(f))
        return tuple(out)

    kwargs: dict = {
        "system": raw["system"],
        "mode": raw["mode"],
        "N_list": _ints(raw["N_list"]),
    }
    if "q_list" in raw:
        kwargs["q_list"] = _floats(raw["q_list"])
    if "sigma_u_list" in raw:
        kwargs["sigma_u_list"] = _floats(raw["sigma_u_list"])
    scalar_keys = (
        ("lambda", "lam", float),
        ("delta", "delta", float),
        ("trials", "trials", int),
        ("master_seed", "master_seed", int),
        ("noise_kind", "noise_kind", str),
        ("sigma_w", "sigma_w", float),
        ("divergence_cap", "divergence_cap", float),
    )
    for key, dest, cast in scalar_keys:
        if key not in raw:
            continue
        try:
            kwargs[dest] = cast(raw[key])
        except ValueError as exc:
            raise ConfigInvalid(f"bad value for {key!r}: {raw[key]!r}") from exc
    opts = {}
    for key, dest, cast in (
        ("linear_n", "n", int),
        ("linear_p", "p", int),
        ("linear_radius", "spectral_radius", float),
        ("linear_seed", "seed", int),
    ):
        if key in raw:
            if kwargs["system"] != "linear":
                raise ConfigInvalid(f"{key!r} requires system = linear")
            try:
                opts[dest] = cast(raw[key])
            except ValueError as exc:
                raise ConfigInvalid(
                    f"bad value for {key!r}: {raw[key]!r}"
                ) from exc
    if opts:
        kwargs["system_options"] = opts
    return ExperimentConfig(**kwargs)


def read_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


@dataclass
class SweepRow:
    """One grid cell: error statistics over completed trials plus the
    matching a-priori bound (multi-trajectory cells only)."""

    mode: str
    param: float
    N: int
    mean_error: float
    std_error: float
    trials_completed: int
    diverged_count: int
    bound_total: float
    bound_valid: bool
    errors: tuple[float, ...] = ()


@dataclass
class SweepResult:
    config: ExperimentConfig
    rows: list[SweepRow]

    def metadata(self) -> dict:
        cfg = self.config
        meta = {
            "system": cfg.system,
            "mode": cfg.mode,
            "lambda": cfg.lam,
            "delta": cfg.delta,
            "trials": cfg.trials,
            "master_seed": cfg.master_seed,
            "noise_kind": cfg.noise_kind,
            "sigma_w": cfg.sigma_w,
            "divergence_cap": cfg.divergence_cap,
        }
        for k, v in sorted(cfg.system_options.items()):
            meta[f"system_{k}"] = v
        return meta


def _build_system(cfg: ExperimentConfig) -> SystemModel:
    return get_system(cfg.system, **cfg.system_options)


def _cell_bound(
    cfg: ExperimentConfig, sys: SystemModel, q: float, N: int
) -> tuple[float, bool]:
    noise = NoiseSpec(kind=cfg.noise_kind, sigma_w=cfg.sigma_w)
    inputs = BoundInputs(
        n=sys.n,
        p=sys.p,
        N=N,
        q=q,
        lam=cfg.lam,
        delta=cfg.delta,
        sigma_w=noise.effective_sigma,
        beta=sys.beta if sys.beta is not None else 0.0,
        theta_norm=spectral_norm(sys.theta.matrix),
        ball_radius=sys.ball_radius,
    )
    rep = total_error_bound(inputs)
    return rep.total, rep.valid


def _run_cell(
    cfg: ExperimentConfig, sys: SystemModel, param: float, N: int
) -> SweepRow:
    noise = NoiseSpec(kind=cfg.noise_kind, sigma_w=cfg.sigma_w)
    seeds = SeedPolicy(cfg.master_seed)
    errors: list[float] = []
    diverged = 0
    for t in range(cfg.trials):
        try:
            if cfg.mode == "multi_traj":
                ds = collect_multi(sys, param, N, noise, seeds, trial=t)
            else:
                ds, div = collect_single(
                    sys,
                    param,
                    N,
                    noise,
                    seeds,
                    trial=t,
                    divergence_cap=cfg.divergence_cap,
                )
                if div is not None:
                    diverged += 1
                    continue
            theta_hat = fit(assemble(ds), cfg.lam)
        except SingularGram:
            diverged += 1
            continue
        errors.append(estimation_error(theta_hat, sys.theta))
    if cfg.mode == "multi_traj":
        bound_total, bound_valid = _cell_bound(cfg, sys, param, N)
    else:
        bound_total, bound_valid = math.nan, False
    arr = np.array(errors)
    return SweepRow(
        mode=cfg.mode,
        param=param,
        N=N,
        mean_error=float(arr.mean()) if errors else math.nan,
        std_error=float(arr.std()) if errors else math.nan,
        trials_completed=len(errors),
        diverged_count=diverged,
        bound_total=bound_total,
        bound_valid=bound_valid,
        errors=tuple(errors),
    )


def run_sweep(cfg: ExperimentConfig, workers: int = 1) -> SweepResult:
    """Run every ``(param, N)`` cell of the grid.

    ``workers > 1`` evaluates cells in a thread pool; results are
    identical to the sequential run because every cell is a pure function
    of the config.
    """
    sys = _build_system(cfg)
    cells = [(param, N) for param in cfg.params for N in cfg.N_list]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(
                pool.map(lambda c: _run_cell(cfg, sys, c[0], c[1]), cells)
            )
    else:
        rows = [_run_cell(cfg, sys, param, N) for param, N in cells]
    return SweepResult(config=cfg, rows=rows)


# ---------------------------------------------------------------------------
# CSV output

SWEEP_COLUMNS = (
    "mode,param,N,mean_error,std_error,trials_completed,diverged_count,"
    "bound_total,bound_valid"
)


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def sweep_csv_text(result: SweepResult) -> str:
    meta = result.metadata()
    lines = [
        "# " + " ".join(f"{k}={v}" for k, v in meta.items()),
        SWEEP_COLUMNS,
    ]
    for r in result.rows:
        lines.append(
            ",".join(
                [
                    r.mode,
                    _fmt(r.param),
                    str(r.N),
                    _fmt(r.mean_error),
                    _fmt(r.std_error),
                    str(r.trials_completed),
                    str(r.diverged_count),
                    _fmt(r.bound_total),
                    "1" if r.bound_valid else "0",
                ]
            )
        )
    return "\n".join(lines) + "\n"


def emit_csv(result: SweepResult, path) -> None:
    Path(path).write_text(sweep_csv_text(result))


# ---------------------------------------------------------------------------
# Figure presets

#: 12 sample counts, log-spaced from 1e2 to 1e5
FIGURE_N_GRID = tuple(
    int(v) for v in np.geomspace(100, 100000, 12).astype(int)
)

_FIGURES = {
    "fig1": dict(
        system="pendulum", mode="multi_traj", q_list=(1.2, 0.9, 0.6)
    ),
    "fig2": dict(
        system="pendulum",
        mode="single_traj",
        sigma_u_list=(0.1, 0.01, 0.001),
    ),
    "fig3": dict(system="strong", mode="multi_traj", q_list=(0.6, 0.4, 0.2)),
}


def figure_preset(name: str, master_seed: int = 7) -> ExperimentConfig:
    """Pinned sweep configuration reproducing one of the study figures.

    ``fig1``: pendulum, restart excitation sweep; ``fig2``: pendulum, one
    trajectory with Gaussian inputs; ``fig3``: strongly nonlinear system,
    restart sweep.  All use ``lam = 0``, Gaussian noise ``sigma_w = 0.5``,
    ``delta = 0.1`` and 10 trials on a 12-point log grid of N.
    """
    if name not in _FIGURES:
        raise ConfigInvalid(
            f"unknown figure {name!r}; expected one of {sorted(_FIGURES)}"
        )
    return ExperimentConfig(
        N_list=FIGURE_N_GRID,
        lam=0.0,
        delta=0.1,
        trials=10,
        master_seed=master_seed,
        noise_kind="gaussian",
        sigma_w=0.5,
        divergence_cap=1e6,
        **_FIGURES[name],
    )


__all__ = [
    "ExperimentConfig",
    "SweepRow",
    "SweepResult",
    "parse_config",
    "read_config",
    "run_sweep",
    "emit_csv",
    "sweep_csv_text",
    "figure_preset",
    "FIGURE_N_GRID",
    "SWEEP_COLUMNS",
    "MODES",
]
