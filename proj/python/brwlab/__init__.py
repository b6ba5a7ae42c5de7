"""Branching random walk laboratory.

Thin re-export of the compiled core: walk kernels, offspring laws, regime
classification, moment ODE trajectories, Monte Carlo estimators, and the
asymptote tables.
"""

from ._core import (
    BrwlabError,
    ConfigError,
    MomentTrajectory,
    OffspringLaw,
    WalkKernel,
    beta_critical,
    classify,
    config_kernel,
    config_law,
    critical_death_rate,
    fit_growth,
    lambda0,
    parse_config,
    predicted_asymptote,
    run_config_moments,
    sample_limit_law,
    simulate,
    solve_moments,
    validate_regime,
)

__all__ = [
    "BrwlabError",
    "ConfigError",
    "MomentTrajectory",
    "OffspringLaw",
    "WalkKernel",
    "beta_critical",
    "classify",
    "config_kernel",
    "config_law",
    "critical_death_rate",
    "fit_growth",
    "lambda0",
    "parse_config",
    "predicted_asymptote",
    "run_config_moments",
    "sample_limit_law",
    "simulate",
    "solve_moments",
    "validate_regime",
]

__version__ = "0.1.0"
