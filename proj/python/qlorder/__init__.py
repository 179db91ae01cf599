"""Quasi-likelihood order estimation for multi-component signals."""

from ._core import (
    ComponentParams,
    Config,
    ConfigError,
    DecisionStats,
    DegenerateError,
    InvalidArgument,
    abridged_error_approx,
    abridged_error_exact,
    approx_valid,
    decision_stats,
    doppler_speed_limit,
    estimate_order,
    likelihood_profile,
    normal_cdf,
    simulate,
    sweep,
    synthesize,
    theory,
    worst_case,
)

__all__ = [name for name in dir() if not name.startswith("_")]
