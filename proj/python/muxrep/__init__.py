"""Waiting times and entanglement distribution rates for parallel and
multiplexed quantum repeaters."""

from ._core import (
    Architecture,
    RepeaterParams,
    doubling_params,
    mean_time_infinite,
    mean_time_finite,
    mean_Z_terms,
    mean_Z_asymptotic,
    multiplexed_rate,
    exact_mean_time_doubling,
    exact_rate_multiplexed,
    dlcz_derive,
    lifetime_to_units,
    run_trial,
    estimate_rate,
    verify,
)

__all__ = [
    "Architecture",
    "RepeaterParams",
    "doubling_params",
    "mean_time_infinite",
    "mean_time_finite",
    "mean_Z_terms",
    "mean_Z_asymptotic",
    "multiplexed_rate",
    "exact_mean_time_doubling",
    "exact_rate_multiplexed",
    "dlcz_derive",
    "lifetime_to_units",
    "run_trial",
    "estimate_rate",
    "verify",
]
