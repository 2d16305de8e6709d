"""Request/response models for the HTTP service.

JSON uses ``lambda`` for the ridge knob (matching the CLI flag); the
Python-side field is ``lam``.  Unbounded radii and undefined statistics
are ``null`` rather than IEEE specials so every payload is valid JSON.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

Mode = Literal["multi_traj", "single_traj"]
NoiseKind = Literal["gaussian", "uniform", "none"]


class SystemInfo(BaseModel):
    name: str
    n: int
    p: int
    ball_radius: Optional[float] = None
    beta: Optional[float] = None
    theta: list[list[float]]


class BoundRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    n: int = Field(ge=1)
    p: int = Field(ge=1)
    N: int = Field(ge=1)
    q: float = Field(gt=0)
    lam: float = Field(default=0.0, ge=0, alias="lambda")
    delta: float = Field(default=0.1, gt=0, lt=1)
    sigma_w: float = Field(default=0.5, ge=0)
    beta: float = Field(default=0.0, ge=0)
    theta_norm: float = Field(default=0.0, ge=0)
    ball_radius: Optional[float] = Field(default=None, gt=0)


class BoundResponse(BaseModel):
    noise_term: float
    nonlin_term: float
    reg_term: float
    total: float
    valid: bool


class AcquireRequest(BaseModel):
    system: Literal["pendulum", "strong"]
    mode: Mode
    N: int = Field(ge=1)
    q: Optional[float] = Field(default=None, gt=0)
    sigma_u: Optional[float] = Field(default=None, ge=0)
    noise_kind: NoiseKind = "gaussian"
    sigma_w: float = Field(default=0.5, ge=0)
    master_seed: int = 0
    trial: int = Field(default=0, ge=0)
    divergence_cap: float = Field(default=1e6, gt=0)


class AcquireResponse(BaseModel):
    system: str
    mode: str
    n: int
    p: int
    N: int
    requested_N: int
    q: Optional[float] = None
    sigma_u: Optional[float] = None
    master_seed: int
    trial: int
    noise_kind: str
    sigma_w: float
    diverged_at: Optional[int] = None
    x0: list[list[float]]
    u0: list[list[float]]
    x1: list[list[float]]


class EstimateRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    x0: list[list[float]]
    u0: list[list[float]]
    x1: list[list[float]]
    lam: float = Field(default=0.0, ge=0, alias="lambda")
    system: Optional[Literal["pendulum", "strong"]] = None


class EstimateResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    n: int
    p: int
    N: int
    lam: float = Field(alias="lambda")
    A: list[list[float]]
    B: list[list[float]]
    o: list[float]
    gram_min_eig: float
    error_vs_truth: Optional[float] = None


class SweepRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    system: Literal["pendulum", "strong", "linear"]
    mode: Mode
    N_list: list[int]
    q_list: Optional[list[float]] = None
    sigma_u_list: Optional[list[float]] = None
    lam: float = Field(default=0.0, ge=0, alias="lambda")
    delta: float = Field(default=0.1, gt=0, lt=1)
    trials: int = Field(default=10, ge=1)
    master_seed: int = 0
    noise_kind: NoiseKind = "gaussian"
    sigma_w: float = Field(default=0.5, ge=0)
    divergence_cap: float = Field(default=1e6, gt=0)
    workers: int = Field(default=1, ge=1)
    linear_n: int = Field(default=2, ge=1)
    linear_p: int = Field(default=1, ge=1)
    linear_radius: float = Field(default=0.9, ge=0)
    linear_seed: int = 0


class SweepRowModel(BaseModel):
    mode: str
    param: float
    N: int
    mean_error: Optional[float] = None
    std_error: Optional[float] = None
    trials_completed: int
    diverged_count: int
    bound_total: Optional[float] = None
    bound_valid: bool


class SweepResponse(BaseModel):
    meta: dict[str, str]
    rows: list[SweepRowModel]
