"""Command-line interface.

Subcommands map onto the library one-to-one:

* ``acquire``   — generate a dataset (restarts or one trajectory) as CSV
* ``estimate``  — fit ``[A B o]`` to a dataset CSV and report it
* ``bound``     — evaluate the a-priori error bound for given knobs
* ``sweep``     — run a config-file-driven parameter sweep to CSV
* ``reproduce`` — run one of the pinned study sweeps (fig1/fig2/fig3)
* ``serve``     — start the HTTP service wrapping the same operations

Exit codes: 0 success, 1 usage error, 2 runtime failure (bad data,
singular fit, unsatisfied precondition, I/O).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .acquisition import (
    DEFAULT_DIVERGENCE_CAP,
    collect_multi,
    collect_single,
    dataset_csv_text,
    read_dataset_csv,
    write_dataset_csv,
)
from .bounds import BoundInputs, bound_csv_text, total_error_bound
from .dynamics import get_system
from .errors import LinSysIdError
from .estimator import fit_report
from .harness import (
    MODES,
    figure_preset,
    read_config,
    run_sweep,
    sweep_csv_text,
)
from .noise import NOISE_KINDS, NoiseSpec, SeedPolicy


class _Usage(Exception):
    """Bad flag combination detected after argparse."""


def _add_linear_opts(sp: argparse.ArgumentParser):
    sp.add_argument(
        "--linear-n", type=int, default=2, help="state dimension (linear)"
    )
    sp.add_argument(
        "--linear-p", type=int, default=1, help="input dimension (linear)"
    )
    sp.add_argument(
        "--linear-radius",
        type=float,
        default=0.9,
        help="spectral radius of A (linear)",
    )
    sp.add_argument(
        "--linear-seed", type=int, default=0, help="draw seed (linear)"
    )


def _system_options(args) -> dict:
    if args.system != "linear":
        return {}
    return {
        "n": args.linear_n,
        "p": args.linear_p,
        "spectral_radius": args.linear_radius,
        "seed": args.linear_seed,
    }


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="linsysid",
        description=(
            "Identify the linearized model [A B o] of a nonlinear "
            "discrete-time system from simulated experiments, with "
            "computable finite-sample error bounds."
        ),
    )
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("acquire", help="generate a dataset CSV")
    a.add_argument(
        "--system",
        required=True,
        choices=["pendulum", "strong", "linear"],
    )
    a.add_argument("--mode", required=True, choices=list(MODES))
    a.add_argument("--N", type=int, required=True, help="sample count")
    a.add_argument(
        "--q", type=float, help="restart excitation (multi_traj only)"
    )
    a.add_argument(
        "--sigma-u",
        type=float,
        dest="sigma_u",
        help="input level (single_traj only)",
    )
    a.add_argument("--noise", choices=list(NOISE_KINDS), default="gaussian")
    a.add_argument("--sigma-w", type=float, dest="sigma_w", default=0.5)
    a.add_argument("--seed", type=int, default=0, help="master seed")
    a.add_argument("--trial", type=int, default=0, help="trial substream")
    a.add_argument(
        "--cap",
        type=float,
        default=DEFAULT_DIVERGENCE_CAP,
        help="magnitude cap before declaring divergence (single_traj)",
    )
    a.add_argument("--out", type=Path, help="output CSV (default stdout)")
    _add_linear_opts(a)
    a.set_defaults(func=_cmd_acquire)

    e = sub.add_parser("estimate", help="fit [A B o] to a dataset CSV")
    e.add_argument("--data", type=Path, required=True, help="dataset CSV")
    e.add_argument(
        "--lambda",
        type=float,
        dest="lam",
        default=0.0,
        help="ridge regularization (default 0)",
    )
    e.add_argument(
        "--system",
        choices=["pendulum", "strong"],
        help=(
            "compare against this system's true parameters (defaults to "
            "the dataset's recorded system when it is a built-in)"
        ),
    )
    e.add_argument("--out", type=Path, help="report file (default stdout)")
    e.set_defaults(func=_cmd_estimate)

    b = sub.add_parser("bound", help="evaluate the a-priori error bound")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--p", type=int, required=True)
    b.add_argument("--N", type=int, required=True)
    b.add_argument("--q", type=float, required=True)
    b.add_argument("--lambda", type=float, dest="lam", default=0.0)
    b.add_argument("--delta", type=float, default=0.1)
    b.add_argument("--sigma-w", type=float, dest="sigma_w", default=0.5)
    b.add_argument("--beta", type=float, default=0.0)
    b.add_argument("--theta-norm", type=float, dest="theta_norm", default=0.0)
    b.add_argument(
        "--c",
        type=float,
        default=float("inf"),
        help="model-validity ball radius (default unbounded)",
    )
    b.add_argument("--out", type=Path, help="CSV row file (default stdout)")
    b.set_defaults(func=_cmd_bound)

    s = sub.add_parser("sweep", help="run a sweep described by a config file")
    s.add_argument("--config", type=Path, required=True)
    s.add_argument("--out", type=Path, help="output CSV (default stdout)")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=_cmd_sweep)

    r = sub.add_parser("reproduce", help="run a pinned study sweep")
    r.add_argument("figure", choices=["fig1", "fig2", "fig3"])
    r.add_argument("--seed", type=int, default=7, help="master seed")
    r.add_argument(
        "--out", type=Path, help="output CSV (default <figure>.csv)"
    )
    r.add_argument("--workers", type=int, default=1)
    r.set_defaults(func=_cmd_reproduce)

    v = sub.add_parser("serve", help="start the HTTP service")
    v.add_argument("--host", default="127.0.0.1")
    v.add_argument("--port", type=int, default=8000)
    v.set_defaults(func=_cmd_serve)

    return ap


def _cmd_acquire(args) -> int:
    if args.mode == "multi_traj":
        if args.q is None:
            raise _Usage("--q is required for --mode multi_traj")
        if args.sigma_u is not None:
            raise _Usage("--sigma-u only applies to --mode single_traj")
    else:
        if args.sigma_u is None:
            raise _Usage("--sigma-u is required for --mode single_traj")
        if args.q is not None:
            raise _Usage("--q only applies to --mode multi_traj")
    system = get_system(args.system, **_system_options(args))
    noise = NoiseSpec(kind=args.noise, sigma_w=args.sigma_w)
    seeds = SeedPolicy(args.seed)
    if args.mode == "multi_traj":
        ds = collect_multi(system, args.q, args.N, noise, seeds, args.trial)
    else:
        ds, diverged_at = collect_single(
            system,
            args.sigma_u,
            args.N,
            noise,
            seeds,
            args.trial,
            divergence_cap=args.cap,
        )
        if diverged_at is not None:
            print(
                f"note: trajectory diverged at step {diverged_at}; "
                f"kept {len(ds)} of {args.N} samples",
                file=sys.stderr,
            )
    if args.out is not None:
        write_dataset_csv(ds, args.out)
    else:
        sys.stdout.write(dataset_csv_text(ds))
    return 0


def _cmd_estimate(args) -> int:
    ds = read_dataset_csv(args.data)
    name = args.system or ds.system
    theta_true = (
        get_system(name).theta if name in ("pendulum", "strong") else None
    )
    report = fit_report(ds, lam=args.lam, theta_true=theta_true)
    text = report.to_text()
    if args.out is not None:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_bound(args) -> int:
    inputs = BoundInputs(
        n=args.n,
        p=args.p,
        N=args.N,
        q=args.q,
        lam=args.lam,
        delta=args.delta,
        sigma_w=args.sigma_w,
        beta=args.beta,
        theta_norm=args.theta_norm,
        ball_radius=args.c,
    )
    report = total_error_bound(inputs)
    if args.out is not None:
        Path(args.out).write_text(bound_csv_text(report))
    else:
        for key in ("noise_term", "nonlin_term", "reg_term", "total"):
            print(f"{key}={getattr(report, key):.17g}")
        print(f"valid={'1' if report.valid else '0'}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = read_config(args.config)
    result = run_sweep(cfg, workers=args.workers)
    text = sweep_csv_text(result)
    if args.out is not None:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_reproduce(args) -> int:
    cfg = figure_preset(args.figure, master_seed=args.seed)
    result = run_sweep(cfg, workers=args.workers)
    out = args.out if args.out is not None else Path(f"{args.figure}.csv")
    Path(out).write_text(sweep_csv_text(result))
    print(f"wrote {out}", file=sys.stderr)
    return 0


def _cmd_serve(args) -> int:  # pragma: no cover - blocks on a socket
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        ret = args.func(args)
        return 0 if ret is None else int(ret)
    except _Usage as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except LinSysIdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
