"""Stein and geodesic losses.

Both are functions of the generalized eigenvalues lambda_i of sigma^{-1} phi:
Stein sum(lambda - log lambda - 1), geodesic sum(log^2 lambda). The geodesic value
is the squared affine-invariant distance; its root is the geodesic length.
"""

import numpy as np

from covrisk.errors import DimensionMismatchError, NotPositiveDefiniteError
from covrisk.models.risk import Coordinates, LossKind
from covrisk.services.matrix_core import SpdMatrix, generalized_eigenvalues, iwasawa_pivots, jacobi_eigh
from covrisk.services.matrix_core.kernels import FloatArray, whiten


def stein_from_eigenvalues(eigenvalues: FloatArray) -> FloatArray:
    """sum_i (lambda_i - log lambda_i - 1) over the last axis."""
    excess = eigenvalues - 1
    # x - log1p(x) keeps precision for lambda near 1
    return np.maximum(np.sum(excess - np.log1p(excess), axis=-1), 0.0)


def geodesic_from_eigenvalues(eigenvalues: FloatArray) -> FloatArray:
    """sum_i log^2 lambda_i over the last axis."""
    return np.sum(np.log(eigenvalues) ** 2, axis=-1)


_FROM_EIGENVALUES = {
    LossKind.STEIN: stein_from_eigenvalues,
    LossKind.GEODESIC: geodesic_from_eigenvalues,
}


def loss_from_eigenvalues(kind: LossKind, eigenvalues: FloatArray) -> FloatArray:
    return _FROM_EIGENVALUES[kind](eigenvalues)


def batch_loss(
    kind: LossKind, estimates: FloatArray, sigma: SpdMatrix | None = None, coordinates: Coordinates = Coordinates.FULL
) -> FloatArray:
    """Loss of every estimate in a (size, p, p) stack against one sigma (identity when None).

    STARRED compares Iwasawa pivots, so the eigenvalues are the pivot ratios.
    """
    if sigma is not None and estimates.shape[-1] != sigma.p:
        raise DimensionMismatchError(f"Estimates of dimension {estimates.shape[-1]} against sigma of {sigma.p}")

    if coordinates is Coordinates.STARRED:
        ratios = iwasawa_pivots(estimates)
        if sigma is not None:
            ratios = ratios / iwasawa_pivots(sigma.entries)
        return loss_from_eigenvalues(kind, ratios)

    whitened = estimates if sigma is None else whiten(sigma.entries, estimates)
    eigenvalues, _ = jacobi_eigh(whitened)
    if not np.all(eigenvalues > 0):
        raise NotPositiveDefiniteError("Estimate is not positive definite relative to sigma")
    return loss_from_eigenvalues(kind, eigenvalues)


def stein_loss(estimate: SpdMatrix, sigma: SpdMatrix) -> float:
    """tr(sigma^{-1} phi) - log det(sigma^{-1} phi) - p; zero iff phi == sigma."""
    return float(stein_from_eigenvalues(generalized_eigenvalues(sigma, estimate)))


def geodesic_loss(estimate: SpdMatrix, sigma: SpdMatrix) -> float:
    """sum_i log^2 lambda_i(sigma^{-1} phi); symmetric in its arguments."""
    return float(geodesic_from_eigenvalues(generalized_eigenvalues(sigma, estimate)))


def evaluate_loss(
    kind: LossKind, estimate: SpdMatrix, sigma: SpdMatrix, coordinates: Coordinates = Coordinates.FULL
) -> float:
    """Loss of one estimate in the requested frame."""
    if estimate.p != sigma.p:
        raise DimensionMismatchError(f"Dimension mismatch: {estimate.p} vs {sigma.p}")
    if coordinates is Coordinates.STARRED:
        ratios = iwasawa_pivots(estimate.entries) / iwasawa_pivots(sigma.entries)
        return float(loss_from_eigenvalues(kind, ratios))
    if kind is LossKind.STEIN:
        return stein_loss(estimate, sigma)
    return geodesic_loss(estimate, sigma)
