"""Estimators on stacks of Wishart draws.

Every kernel maps a ``WishartBatch`` (plus, for the rotation-equivariant pair, a
calibration) to a (size, p, p) stack of estimates. The diagonal estimators return
diag(sigma*-estimate) matrices.
"""

from collections.abc import Callable

import numpy as np

from covrisk.errors import CalibrationMismatchError, DimensionMismatchError, MissingCalibrationError
from covrisk.models.calibration import SpectralCalibration
from covrisk.models.risk import EstimatorKind
from covrisk.services.matrix_core import diag_embed, iwasawa_pivots, jacobi_eigh
from covrisk.services.matrix_core.kernels import FloatArray, symmetrize
from covrisk.services.sampling import WishartBatch

from .multipliers import geodesic_multipliers, iwasawa_divisors, stein_divisors

BatchEstimator = Callable[[WishartBatch, SpectralCalibration | None], FloatArray]


def scaled_gram(factors: FloatArray, diagonal_scale: FloatArray) -> FloatArray:
    """T D T' for a stack of factors T and one diagonal D."""
    return symmetrize((factors * diagonal_scale) @ np.swapaxes(factors, -1, -2))


def rescaled_factor_gram(factors: FloatArray, multipliers: FloatArray) -> FloatArray:
    """T0 T0' where T0 is T with t_ii replaced by t_ii * sqrt(multipliers_i)."""
    rescaled = factors.copy()
    idx = np.arange(factors.shape[-1])
    rescaled[..., idx, idx] *= np.sqrt(multipliers)
    return symmetrize(rescaled @ np.swapaxes(rescaled, -1, -2))


def spectral_rescale(scatters: FloatArray, multipliers: FloatArray) -> FloatArray:
    """U diag(m_i l_i) U' with A = U diag(l) U', eigenvalues descending."""
    eigenvalues, vectors = jacobi_eigh(scatters)
    return symmetrize((vectors * (multipliers * eigenvalues)[..., None, :]) @ np.swapaxes(vectors, -1, -2))


def _mle(batch: WishartBatch, cal: SpectralCalibration | None) -> FloatArray:
    return batch.scatters / batch.n


def _stein(batch: WishartBatch, cal: SpectralCalibration | None) -> FloatArray:
    return scaled_gram(batch.factors, 1 / stein_divisors(batch.p, batch.n))


def _iwasawa_best(batch: WishartBatch, cal: SpectralCalibration | None) -> FloatArray:
    return diag_embed(iwasawa_pivots(batch.scatters) / iwasawa_divisors(batch.p, batch.n))


def _geodesic_iwasawa(batch: WishartBatch, cal: SpectralCalibration | None) -> FloatArray:
    return diag_embed(iwasawa_pivots(batch.scatters) * geodesic_multipliers(batch.p, batch.n))


def _geodesic_cholesky(batch: WishartBatch, cal: SpectralCalibration | None) -> FloatArray:
    return rescaled_factor_gram(batch.factors, geodesic_multipliers(batch.p, batch.n))


def require_calibration(cal: SpectralCalibration | None, p: int, n: int) -> SpectralCalibration:
    """Return ``cal`` after checking it exists and was computed for (p, n).

    Raises:
        MissingCalibrationError: If ``cal`` is None
        DimensionMismatchError: If the calibration was computed for another p
        CalibrationMismatchError: If it was computed for another n
    """
    if cal is None:
        raise MissingCalibrationError("Rotation-equivariant estimators need a spectral calibration")
    if cal.p != p:
        raise DimensionMismatchError(f"Calibration has dimension {cal.p}, sample has dimension {p}")
    if cal.n != n:
        raise CalibrationMismatchError(f"Calibration is for p={cal.p}, n={cal.n}; requested p={p}, n={n}")
    return cal


def _rot_eq_stein(batch: WishartBatch, cal: SpectralCalibration | None) -> FloatArray:
    cal = require_calibration(cal, batch.p, batch.n)
    return spectral_rescale(batch.scatters, cal.stein_multipliers)


def _rot_eq_geodesic(batch: WishartBatch, cal: SpectralCalibration | None) -> FloatArray:
    cal = require_calibration(cal, batch.p, batch.n)
    return spectral_rescale(batch.scatters, cal.geodesic_multipliers)


BATCH_ESTIMATORS: dict[EstimatorKind, BatchEstimator] = {
    EstimatorKind.MLE: _mle,
    EstimatorKind.STEIN: _stein,
    EstimatorKind.IWASAWA_BEST: _iwasawa_best,
    EstimatorKind.GEODESIC_IWASAWA: _geodesic_iwasawa,
    EstimatorKind.GEODESIC_CHOLESKY: _geodesic_cholesky,
    EstimatorKind.ROT_EQ_STEIN: _rot_eq_stein,
    EstimatorKind.ROT_EQ_GEODESIC: _rot_eq_geodesic,
}


def estimate_batch(kind: EstimatorKind, batch: WishartBatch, cal: SpectralCalibration | None = None) -> FloatArray:
    """Apply estimator ``kind`` to every draw of ``batch``."""
    return BATCH_ESTIMATORS[kind](batch, cal)
