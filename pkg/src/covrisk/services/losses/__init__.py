"""Stein's likelihood loss and the geodesic (affine-invariant) loss."""

from .losses import (
    batch_loss,
    evaluate_loss,
    geodesic_from_eigenvalues,
    geodesic_loss,
    loss_from_eigenvalues,
    stein_from_eigenvalues,
    stein_loss,
)

__all__ = [
    "batch_loss",
    "evaluate_loss",
    "geodesic_from_eigenvalues",
    "geodesic_loss",
    "loss_from_eigenvalues",
    "stein_from_eigenvalues",
    "stein_loss",
]
