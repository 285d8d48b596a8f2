"""Empirical Bayes on fissioned replicates."""

from ._core import (
    ConfigError,
    InputError,
    LikelihoodModel,
    MonotoneStepFn,
    NpmleFit,
    NumericError,
    PriorSpec,
    SimulationError,
    aurora_estimate,
    fission,
    fit_isotonic,
    fit_npmle,
    mse,
    benchmark_defaults_toml,
    posterior_means,
    sample_dataset,
    simulate,
    tau_from_info_split,
)

__all__ = [
    "ConfigError",
    "InputError",
    "LikelihoodModel",
    "MonotoneStepFn",
    "NpmleFit",
    "NumericError",
    "PriorSpec",
    "SimulationError",
    "aurora_estimate",
    "fission",
    "fit_isotonic",
    "fit_npmle",
    "mse",
    "benchmark_defaults_toml",
    "posterior_means",
    "sample_dataset",
    "simulate",
    "tau_from_info_split",
]
