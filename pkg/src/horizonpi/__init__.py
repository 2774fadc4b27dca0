"""Prediction intervals for the average of the next m values of a series
regressed on many (possibly p >> n) covariates.

Quenched-CLT, empirical-quantile and bootstrap-adjusted intervals on top
of OLS/LAD/lasso residuals, simulation generators for heavy-tailed,
long-memory and smooth-transition error processes, a Monte Carlo coverage
harness and a concentration-bound checker.
"""

__version__ = "0.1.0"

from ._backend import backend_name
from .dgp import (
    BetaSpec,
    DgpSpec,
    draw_beta,
    exp_weights,
    gen_ar1,
    gen_deterministic_covariates,
    gen_longmem,
    gen_lstar,
    gen_stochastic_covariates,
    logistic_transition,
    sample_alpha_stable,
    simulate_errors,
)
from .harness import (
    CoverageReport,
    CovariateSpec,
    ExperimentConfig,
    get_preset,
    run_coverage_experiment,
    run_rep,
)
from .intervals import (
    BootstrapConfig,
    PredictionInterval,
    default_block_len,
    kernel_quantile,
    longrun_sd_subsample,
    pi_adj,
    pi_clt,
    pi_qtl,
    pi_regression,
    stationary_bootstrap,
)
from .linmodel import (
    DesignMatrix,
    FitResult,
    ObservationWeights,
    Series,
    cv_lasso,
    default_lambda_grid,
    fit_lad,
    fit_lasso,
    fit_ols,
    lambda_max,
    soft_threshold,
)
from .nagaev import (
    LinearProcessSpec,
    NagaevConstants,
    innovation_norms,
    mc_tail_estimate,
    nagaev_bound_linear,
)

__all__ = [
    "__version__",
    "backend_name",
    "BetaSpec", "DgpSpec", "draw_beta", "exp_weights", "gen_ar1",
    "gen_deterministic_covariates", "gen_longmem", "gen_lstar",
    "gen_stochastic_covariates", "logistic_transition",
    "sample_alpha_stable", "simulate_errors",
    "CoverageReport", "CovariateSpec", "ExperimentConfig", "get_preset",
    "run_coverage_experiment", "run_rep",
    "BootstrapConfig", "PredictionInterval", "default_block_len",
    "kernel_quantile", "longrun_sd_subsample", "pi_adj", "pi_clt",
    "pi_qtl", "pi_regression", "stationary_bootstrap",
    "DesignMatrix", "FitResult", "ObservationWeights", "Series",
    "cv_lasso", "default_lambda_grid", "fit_lad", "fit_lasso", "fit_ols",
    "lambda_max", "soft_threshold",
    "LinearProcessSpec", "NagaevConstants", "innovation_norms",
    "mc_tail_estimate", "nagaev_bound_linear",
]
