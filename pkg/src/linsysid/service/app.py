"""FastAPI application wrapping the identification library.

Domain failures (singular fits, violated preconditions, malformed data)
surface as HTTP 400 with a ``detail`` message; schema violations are
FastAPI's usual 422.
"""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..acquisition import Dataset, collect_multi, collect_single
from ..bounds import BoundInputs, total_error_bound
from ..dynamics import get_system, pendulum, strongly_nonlinear
from ..errors import DimensionMismatch, LinSysIdError
from ..estimator import fit_report
from ..harness import ExperimentConfig, run_sweep
from ..noise import NoiseSpec, SeedPolicy
from .schemas import (
    AcquireRequest,
    AcquireResponse,
    BoundRequest,
    BoundResponse,
    EstimateRequest,
    EstimateResponse,
    SweepRequest,
    SweepResponse,
    SweepRowModel,
    SystemInfo,
)


def _none_if_nan(x: float) -> float | None:
    return None if math.isnan(x) else float(x)


def create_app() -> FastAPI:
    app = FastAPI(
        title="linsysid",
        version=__version__,
        description=(
            "Linearized-model identification with computable "
            "finite-sample error bounds."
        ),
    )

    @app.exception_handler(LinSysIdError)
    async def _domain_error(request: Request, exc: LinSysIdError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/")
    def root():
        return {"name": "linsysid", "version": __version__}

    @app.get("/systems", response_model=list[SystemInfo])
    def systems():
        out = []
        for s in (pendulum(), strongly_nonlinear()):
            out.append(
                SystemInfo(
                    name=s.name,
                    n=s.n,
                    p=s.p,
                    ball_radius=(
                        s.ball_radius
                        if math.isfinite(s.ball_radius)
                        else None
                    ),
                    beta=s.beta,
                    theta=s.theta.matrix.tolist(),
                )
            )
        return out

    @app.post("/bound", response_model=BoundResponse)
    def bound(req: BoundRequest):
        inputs = BoundInputs(
            n=req.n,
            p=req.p,
            N=req.N,
            q=req.q,
            lam=req.lam,
            delta=req.delta,
            sigma_w=req.sigma_w,
            beta=req.beta,
            theta_norm=req.theta_norm,
            ball_radius=(
                req.ball_radius if req.ball_radius is not None else np.inf
            ),
        )
        rep = total_error_bound(inputs)
        return BoundResponse(
            noise_term=rep.noise_term,
            nonlin_term=rep.nonlin_term,
            reg_term=rep.reg_term,
            total=rep.total,
            valid=rep.valid,
        )

    @app.post("/acquire", response_model=AcquireResponse)
    def acquire(req: AcquireRequest):
        system = get_system(req.system)
        noise = NoiseSpec(kind=req.noise_kind, sigma_w=req.sigma_w)
        seeds = SeedPolicy(req.master_seed)
        if req.mode == "multi_traj":
            if req.q is None:
                raise DimensionMismatch("q is required for multi_traj")
            ds = collect_multi(system, req.q, req.N, noise, seeds, req.trial)
            diverged_at = None
        else:
            if req.sigma_u is None:
                raise DimensionMismatch(
                    "sigma_u is required for single_traj"
                )
            ds, diverged_at = collect_single(
                system,
                req.sigma_u,
                req.N,
                noise,
                seeds,
                req.trial,
                divergence_cap=req.divergence_cap,
            )
        return AcquireResponse(
            system=ds.system,
            mode=ds.mode,
            n=ds.n,
            p=ds.p,
            N=len(ds),
            requested_N=ds.requested_N,
            q=ds.q,
            sigma_u=ds.sigma_u,
            master_seed=req.master_seed,
            trial=req.trial,
            noise_kind=ds.noise_kind,
            sigma_w=ds.sigma_w,
            diverged_at=diverged_at,
            x0=ds.x0.tolist(),
            u0=ds.u0.tolist(),
            x1=ds.x1.tolist(),
        )

    @app.post("/estimate", response_model=EstimateResponse)
    def estimate(req: EstimateRequest):
        try:
            ds = Dataset(x0=req.x0, u0=req.u0, x1=req.x1)
        except ValueError as exc:
            raise DimensionMismatch(f"ragged sample arrays: {exc}") from exc
        theta_true = (
            get_system(req.system).theta if req.system is not None else None
        )
        rep = fit_report(ds, lam=req.lam, theta_true=theta_true)
        th = rep.theta_hat
        return EstimateResponse(
            n=th.n,
            p=th.p,
            N=rep.N,
            lam=rep.lam,
            A=th.A.tolist(),
            B=th.B.tolist(),
            o=th.o.tolist(),
            gram_min_eig=rep.gram_min_eig,
            error_vs_truth=rep.error_vs_truth,
        )

    @app.post("/sweep", response_model=SweepResponse)
    def sweep(req: SweepRequest):
        options = {}
        if req.system == "linear":
            options = {
                "n": req.linear_n,
                "p": req.linear_p,
                "spectral_radius": req.linear_radius,
                "seed": req.linear_seed,
            }
        cfg = ExperimentConfig(
            system=req.system,
            mode=req.mode,
            N_list=tuple(req.N_list),
            q_list=tuple(req.q_list or ()),
            sigma_u_list=tuple(req.sigma_u_list or ()),
            lam=req.lam,
            delta=req.delta,
            trials=req.trials,
            master_seed=req.master_seed,
            noise_kind=req.noise_kind,
            sigma_w=req.sigma_w,
            divergence_cap=req.divergence_cap,
            system_options=options,
        )
        result = run_sweep(cfg, workers=req.workers)
        rows = [
            SweepRowModel(
                mode=r.mode,
                param=r.param,
                N=r.N,
                mean_error=_none_if_nan(r.mean_error),
                std_error=_none_if_nan(r.std_error),
                trials_completed=r.trials_completed,
                diverged_count=r.diverged_count,
                bound_total=_none_if_nan(r.bound_total),
                bound_valid=r.bound_valid,
            )
            for r in result.rows
        ]
        meta = {k: str(v) for k, v in result.metadata().items()}
        return SweepResponse(meta=meta, rows=rows)

    return app


app = create_app()
