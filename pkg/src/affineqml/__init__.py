"""Affine causal time series: simulation, quasi-likelihood fits, asymptotics.

The package models series of the form X_t = M(past) * zeta_t + f(past) and
exposes one module per concern: model families and stationarity gates
(models), innovation laws normalized to E|zeta| = 1 (noise), trajectory
generation (simulate), gaussian and laplacian quasi-likelihoods (contrast),
box-constrained contrast maximization (optimize), sandwich covariances and
Wald intervals (asymptotics), and replicated RMSE experiments (montecarlo).
The common entry points are re-exported here; the command line lives in
affineqml.cli and is not imported at package load.
"""

from .asymptotics import (
    Asymptotics,
    attach,
    confidence_intervals,
    g0_estimate,
    gamma_matrices,
    sandwich,
)
from .contrast import KINDS, quasi_loglik, residuals
from .models import (
    FAMILIES,
    ConstraintError,
    InvertibilityError,
    ModelSpec,
    NumericError,
    StationarityError,
    StationarityResult,
    aparch_coefficients,
    arma_psi,
    check_theta,
    conditional_arrays,
    conditional_pair,
    lipschitz_coefficients,
    make_model,
    model_tag,
    param_names,
    simulation_ready,
    stationarity_check,
)
from .montecarlo import ExperimentConfig, RmseRow, RmseTable, rmse, run_experiment
from .noise import (
    LAWS,
    NoiseSpec,
    density,
    density_at_zero,
    make_noise,
    moment_factor,
    sample,
    variance,
)
from .optimize import EstimateResult, OptimConfig, fit
from .simulate import Trajectory, read_trajectory_csv, simulate, write_trajectory_csv

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "FAMILIES",
    "LAWS",
    "KINDS",
    "ModelSpec",
    "NoiseSpec",
    "Trajectory",
    "StationarityResult",
    "ConstraintError",
    "NumericError",
    "StationarityError",
    "InvertibilityError",
    "make_model",
    "make_noise",
    "param_names",
    "model_tag",
    "check_theta",
    "conditional_pair",
    "conditional_arrays",
    "arma_psi",
    "aparch_coefficients",
    "lipschitz_coefficients",
    "stationarity_check",
    "simulation_ready",
    "sample",
    "density",
    "density_at_zero",
    "variance",
    "moment_factor",
    "simulate",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "quasi_loglik",
    "residuals",
    "OptimConfig",
    "EstimateResult",
    "fit",
    "Asymptotics",
    "attach",
    "gamma_matrices",
    "g0_estimate",
    "sandwich",
    "confidence_intervals",
    "ExperimentConfig",
    "RmseRow",
    "RmseTable",
    "rmse",
    "run_experiment",
]
