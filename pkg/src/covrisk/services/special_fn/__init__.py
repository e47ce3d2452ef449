"""Special functions for the analytic risk formulas."""

from .functions import (
    chisq_log_moments,
    chisq_mean_log,
    chisq_var_log,
    digamma,
    log_gamma,
    multivariate_log_gamma,
    trigamma,
)

__all__ = [
    "chisq_log_moments",
    "chisq_mean_log",
    "chisq_var_log",
    "digamma",
    "log_gamma",
    "multivariate_log_gamma",
    "trigamma",
]
