"""Covariance estimators, their correction constants and spectral calibration."""

from .calibration import calibrate_spectrum, load_calibration, save_calibration
from .estimators import (
    estimate,
    geodesic_cholesky,
    geodesic_iwasawa,
    iwasawa_best,
    mle,
    rot_eq_geodesic,
    rot_eq_stein,
    stein_estimator,
)
from .kernels import BATCH_ESTIMATORS, estimate_batch, require_calibration, rescaled_factor_gram
from .multipliers import chisq_dofs, geodesic_multipliers, iwasawa_divisors, stein_divisors

__all__ = [
    "BATCH_ESTIMATORS",
    "calibrate_spectrum",
    "chisq_dofs",
    "estimate",
    "estimate_batch",
    "geodesic_cholesky",
    "geodesic_iwasawa",
    "geodesic_multipliers",
    "iwasawa_best",
    "iwasawa_divisors",
    "load_calibration",
    "mle",
    "require_calibration",
    "rescaled_factor_gram",
    "rot_eq_geodesic",
    "rot_eq_stein",
    "save_calibration",
    "stein_divisors",
    "stein_estimator",
]
