"""Closed-form risks at sigma = I.

Stein-loss risks are sum_i {log d_i - E[log chi2_{n-i+1}]} for the estimator's
divisor d_i. Geodesic risks of the Cholesky-family and Iwasawa-family estimators
live in pivot (starred) coordinates: the minimum is sum_i Var[log chi2_{n-i+1}]
and each mean-based estimator adds its squared log-bias.
"""

import math
from typing import NamedTuple

import numpy as np

from covrisk.errors import DomainError, UnsupportedError
from covrisk.models.risk import Coordinates, EstimatorKind, LossKind
from covrisk.services.estimators import chisq_dofs, iwasawa_divisors, stein_divisors
from covrisk.services.matrix_core.kernels import FloatArray
from covrisk.services.special_fn import chisq_mean_log, chisq_var_log


class ClosedForm(NamedTuple):
    """A closed-form risk: descriptive tag, source tag it is traced to, and the frame it holds in."""

    tag: str
    reference: str
    frame: Coordinates


CLOSED_FORMS: dict[tuple[EstimatorKind, LossKind], ClosedForm] = {
    (EstimatorKind.MLE, LossKind.STEIN): ClosedForm("mle-stein", "eq4", Coordinates.FULL),
    (EstimatorKind.STEIN, LossKind.STEIN): ClosedForm("cholesky-stein", "eq6", Coordinates.FULL),
    (EstimatorKind.IWASAWA_BEST, LossKind.STEIN): ClosedForm("iwasawa-stein", "eq17", Coordinates.STARRED),
    (EstimatorKind.GEODESIC_IWASAWA, LossKind.GEODESIC): ClosedForm("iwasawa-geodesic", "sec3-I", Coordinates.STARRED),
    (EstimatorKind.GEODESIC_CHOLESKY, LossKind.GEODESIC): ClosedForm(
        "cholesky-geodesic", "sec3-II", Coordinates.STARRED
    ),
    (EstimatorKind.IWASAWA_BEST, LossKind.GEODESIC): ClosedForm("iwasawa-geodesic-gap", "sec3-I", Coordinates.STARRED),
    (EstimatorKind.STEIN, LossKind.GEODESIC): ClosedForm("cholesky-geodesic-gap", "sec3-II", Coordinates.STARRED),
    (EstimatorKind.MLE, LossKind.GEODESIC): ClosedForm("mle-geodesic-gap", "sec3-II", Coordinates.STARRED),
}


def _check_dims(p: int, n: int) -> None:
    if p < 1 or n < p:
        raise DomainError(f"Need n >= p >= 1, got p={p}, n={n}")


def log_bias_terms(kind: EstimatorKind, p: int, n: int) -> FloatArray:
    """log d_i - E[log chi2_{n-i+1}] for the divisor d_i of a mean-based estimator."""
    _check_dims(p, n)
    if kind is EstimatorKind.MLE:
        divisors = np.full(p, float(n))
    elif kind is EstimatorKind.STEIN:
        divisors = stein_divisors(p, n)
    elif kind is EstimatorKind.IWASAWA_BEST:
        divisors = iwasawa_divisors(p, n)
    else:
        raise UnsupportedError(f"{kind.value} is not a divisor-based estimator")
    return np.log(divisors) - np.asarray(chisq_mean_log(chisq_dofs(p, n)))


def analytic_stein_risk(kind: EstimatorKind, p: int, n: int) -> float:
    """Stein-loss risk of Mle, Stein or IwasawaBest.

    Raises:
        UnsupportedError: For estimators without a closed-form Stein risk
    """
    if (kind, LossKind.STEIN) not in CLOSED_FORMS:
        raise UnsupportedError(f"No closed-form Stein risk for {kind.value}")
    return math.fsum(log_bias_terms(kind, p, n).tolist())


def minimum_geodesic_risk(p: int, n: int) -> float:
    """sum_i Var[log chi2_{n-i+1}] = sum_i trigamma((n-i+1)/2)."""
    _check_dims(p, n)
    return math.fsum(np.asarray(chisq_var_log(chisq_dofs(p, n))).tolist())


def geodesic_gap(kind: EstimatorKind, p: int, n: int) -> float:
    """Excess geodesic risk of a mean-based estimator over the geodesic optimum."""
    return math.fsum((log_bias_terms(kind, p, n) ** 2).tolist())


def analytic_geodesic_risk(kind: EstimatorKind, p: int, n: int) -> float:
    """Geodesic risk in pivot coordinates.

    GeodesicIwasawa and GeodesicCholesky share one expression; IwasawaBest,
    Stein and Mle add their squared log-bias sums.

    Raises:
        UnsupportedError: For the rotation-equivariant estimators
    """
    if (kind, LossKind.GEODESIC) not in CLOSED_FORMS:
        raise UnsupportedError(f"No closed-form geodesic risk for {kind.value}")
    if kind in (EstimatorKind.GEODESIC_IWASAWA, EstimatorKind.GEODESIC_CHOLESKY):
        return minimum_geodesic_risk(p, n)
    return minimum_geodesic_risk(p, n) + geodesic_gap(kind, p, n)


def analytic_risk(kind: EstimatorKind, loss: LossKind, p: int, n: int) -> tuple[float, ClosedForm] | None:
    """(value, closed form) for the pair, or None when there is none."""
    entry = CLOSED_FORMS.get((kind, loss))
    if entry is None:
        return None
    value = analytic_stein_risk(kind, p, n) if loss is LossKind.STEIN else analytic_geodesic_risk(kind, p, n)
    return value, entry


def default_coordinates(kind: EstimatorKind, loss: LossKind) -> Coordinates:
    """Frame mc_risk evaluates in unless told otherwise.

    Diagonal estimators are always starred; geodesic loss is starred for the
    Cholesky and Iwasawa families, where its closed forms hold.
    """
    if kind.is_diagonal:
        return Coordinates.STARRED
    if kind.needs_calibration:
        return Coordinates.FULL
    return Coordinates.STARRED if loss is LossKind.GEODESIC else Coordinates.FULL
