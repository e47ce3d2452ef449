"""Analytic risks, Monte Carlo risk estimation and the verification battery."""

from .analytic import (
    CLOSED_FORMS,
    ClosedForm,
    analytic_geodesic_risk,
    analytic_risk,
    analytic_stein_risk,
    default_coordinates,
    geodesic_gap,
    log_bias_terms,
    minimum_geodesic_risk,
)
from .monte_carlo import loss_samples, mc_risk, mean_and_se, report_from_samples
from .verification import (
    agreement_check,
    coordinate_invariance_check,
    decay_check,
    gap_identity_checks,
    local_optimality_check,
    rotation_equivariant_checks,
    stein_chain_check,
    verify_ordering,
)

__all__ = [
    "CLOSED_FORMS",
    "ClosedForm",
    "agreement_check",
    "analytic_geodesic_risk",
    "analytic_risk",
    "analytic_stein_risk",
    "coordinate_invariance_check",
    "decay_check",
    "default_coordinates",
    "gap_identity_checks",
    "geodesic_gap",
    "log_bias_terms",
    "local_optimality_check",
    "loss_samples",
    "mc_risk",
    "mean_and_se",
    "minimum_geodesic_risk",
    "report_from_samples",
    "rotation_equivariant_checks",
    "stein_chain_check",
    "verify_ordering",
]
