"""Identification of linearized models of nonlinear discrete-time systems.

The workflow: pick a :class:`~linsysid.dynamics.SystemModel`, generate a
dataset with the deterministic restart scheme
(:func:`~linsysid.acquisition.collect_multi`) or a single driven
trajectory (:func:`~linsysid.acquisition.collect_single`), fit the
linearized parameters ``[A B o]`` with
:func:`~linsysid.estimator.fit`, and compare the achieved error against
the a-priori guarantee from
:func:`~linsysid.bounds.total_error_bound`.  ``linsysid.harness`` runs
full parameter sweeps; the ``linsysid`` CLI and ``linsysid.service``
expose the same operations from the shell and over HTTP.
"""

from .acquisition import (
    DEFAULT_DIVERGENCE_CAP,
    Dataset,
    collect_multi,
    collect_single,
    dataset_csv_text,
    initial_condition,
    initial_conditions,
    read_dataset_csv,
    realized_disturbances,
    write_dataset_csv,
)
from .bounds import (
    BoundInputs,
    BoundReport,
    bound_csv_text,
    gram_eigenvalue_bounds,
    noise_concentration_bound,
    nonlinearity_error_bound,
    total_error_bound,
)
from .dynamics import (
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
from .errors import (
    ConfigInvalid,
    DimensionMismatch,
    EmptyDataset,
    LinSysIdError,
    NotPositiveDefinite,
    NotSymmetric,
    PreconditionViolated,
    SingularGram,
)
from .estimator import (
    ErrorDecomposition,
    EstimateReport,
    RegressionProblem,
    assemble,
    error_decomposition,
    estimation_error,
    fit,
    fit_report,
)
from .harness import (
    FIGURE_N_GRID,
    ExperimentConfig,
    SweepResult,
    SweepRow,
    emit_csv,
    figure_preset,
    parse_config,
    read_config,
    run_sweep,
    sweep_csv_text,
)
from .noise import NoiseSpec, SeedPolicy

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "LinSysIdError",
    "DimensionMismatch",
    "NotSymmetric",
    "NotPositiveDefinite",
    "EmptyDataset",
    "SingularGram",
    "PreconditionViolated",
    "ConfigInvalid",
    # dynamics
    "Theta",
    "SystemModel",
    "pendulum",
    "strongly_nonlinear",
    "random_linear",
    "linear_system",
    "get_system",
    "step",
    "remainder",
    "linear_prediction",
    "estimate_beta",
    # noise
    "NoiseSpec",
    "SeedPolicy",
    # acquisition
    "initial_condition",
    "initial_conditions",
    "collect_multi",
    "collect_single",
    "realized_disturbances",
    "Dataset",
    "dataset_csv_text",
    "write_dataset_csv",
    "read_dataset_csv",
    "DEFAULT_DIVERGENCE_CAP",
    # estimator
    "RegressionProblem",
    "assemble",
    "fit",
    "fit_report",
    "estimation_error",
    "error_decomposition",
    "ErrorDecomposition",
    "EstimateReport",
    # bounds
    "BoundInputs",
    "BoundReport",
    "gram_eigenvalue_bounds",
    "noise_concentration_bound",
    "nonlinearity_error_bound",
    "total_error_bound",
    "bound_csv_text",
    # harness
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
]
