"""Single-sample estimators.

Each is the size-1 case of the matching batch kernel. ``iwasawa_best`` and
``geodesic_iwasawa`` return the diagonal matrix estimating sigma*, not sigma.
"""

from covrisk.models.calibration import SpectralCalibration
from covrisk.models.risk import EstimatorKind
from covrisk.services.matrix_core import SpdMatrix
from covrisk.services.sampling import WishartBatch, WishartSample

from .kernels import estimate_batch


def _as_batch(sample: WishartSample) -> WishartBatch:
    return WishartBatch(
        factors=sample.bartlett_factor.entries[None, ...],
        scatters=sample.scatter.entries[None, ...],
        n=sample.n,
    )


def estimate(kind: EstimatorKind, sample: WishartSample, cal: SpectralCalibration | None = None) -> SpdMatrix:
    """Apply estimator ``kind`` to one sample.

    Raises:
        MissingCalibrationError: If a rotation-equivariant kind is requested without ``cal``
        CalibrationMismatchError: If ``cal`` was computed for another (p, n)
    """
    return SpdMatrix(estimate_batch(kind, _as_batch(sample), cal)[0])


def mle(sample: WishartSample) -> SpdMatrix:
    """A / n (unbiased)."""
    return estimate(EstimatorKind.MLE, sample)


def stein_estimator(sample: WishartSample) -> SpdMatrix:
    """T diag(1 / (n + p - 2i + 1)) T'."""
    return estimate(EstimatorKind.STEIN, sample)


def iwasawa_best(sample: WishartSample) -> SpdMatrix:
    """diag(a_(i)11 / (n - i + 1)) from the Iwasawa pivots of A."""
    return estimate(EstimatorKind.IWASAWA_BEST, sample)


def geodesic_iwasawa(sample: WishartSample) -> SpdMatrix:
    """diag(exp(-E[log chi2_{n-i+1}]) * a_(i)11)."""
    return estimate(EstimatorKind.GEODESIC_IWASAWA, sample)


def geodesic_cholesky(sample: WishartSample) -> SpdMatrix:
    """T0 T0' with the Bartlett diagonal rescaled by sqrt(exp(-E[log chi2_{n-i+1}]))."""
    return estimate(EstimatorKind.GEODESIC_CHOLESKY, sample)


def rot_eq_stein(sample: WishartSample, cal: SpectralCalibration) -> SpdMatrix:
    """U diag(l_i / E[l_i]) U', keeping the sample eigenvectors."""
    return estimate(EstimatorKind.ROT_EQ_STEIN, sample, cal)


def rot_eq_geodesic(sample: WishartSample, cal: SpectralCalibration) -> SpdMatrix:
    """U diag(exp(-E[log l_i]) l_i) U', keeping the sample eigenvectors."""
    return estimate(EstimatorKind.ROT_EQ_GEODESIC, sample, cal)
