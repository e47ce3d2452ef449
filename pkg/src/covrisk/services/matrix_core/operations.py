"""Typed single-matrix operations over the array kernels."""

import numpy as np
import numpy.typing as npt
from scipy.linalg import cho_factor, cho_solve

from covrisk.errors import DimensionMismatchError, DomainError

from .kernels import (
    FloatArray,
    as_square_stack,
    cholesky_factor,
    generalized_eigvals,
    iwasawa_reduce,
    jacobi_eigh,
    symmetrize,
)
from .types import EigenDecomposition, IwasawaResult, LowerTriangular, SpdMatrix


def cholesky(a: SpdMatrix) -> LowerTriangular:
    """A = TT' with T lower triangular and positive diagonal.

    Raises:
        NotPositiveDefiniteError: If a pivot is at most p * eps * max|a_ii|
    """
    return LowerTriangular(cholesky_factor(a.entries))


def iwasawa_full(a: SpdMatrix) -> IwasawaResult:
    """Reduce ``a`` to A* by the Schur-complement recursion, keeping every elimination step.

    The pivots equal the squared Cholesky diagonal.
    """
    pivots, eliminations = iwasawa_reduce(a.entries)
    return IwasawaResult(pivots=pivots, eliminations=tuple(eliminations))


def to_starred(a: SpdMatrix) -> SpdMatrix:
    """The diagonal representative Diag(pivots) of ``a`` under the Iwasawa correspondence."""
    return iwasawa_full(a).starred()


def eigh(a: SpdMatrix | npt.ArrayLike) -> EigenDecomposition:
    """Symmetric eigendecomposition (cyclic Jacobi), eigenvalues descending.

    Positive definiteness is not required; plain arrays must be symmetric.

    Raises:
        DomainError: If a plain array is not symmetric
        NoConvergenceError: If the sweep limit is exceeded
    """
    if isinstance(a, SpdMatrix):
        arr = a.entries
    else:
        arr = as_square_stack(a)
        if arr.ndim != 2:
            raise DimensionMismatchError(f"eigh needs a single matrix, got shape {arr.shape}")
        if not np.allclose(arr, arr.T, rtol=1e-12, atol=0.0):
            raise DomainError("eigh requires a symmetric matrix")
    eigenvalues, eigenvectors = jacobi_eigh(arr)
    return EigenDecomposition(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def congruence(a: SpdMatrix, g: npt.ArrayLike) -> SpdMatrix:
    """g a g', re-symmetrized."""
    g_arr = np.asarray(g, dtype=np.float64)
    if g_arr.shape != (a.p, a.p):
        raise DimensionMismatchError(f"Transform must be {a.p} x {a.p}, got {g_arr.shape}")
    return SpdMatrix(symmetrize(g_arr @ a.entries @ g_arr.T))


def generalized_eigenvalues(sigma: SpdMatrix, phi: SpdMatrix) -> FloatArray:
    """Eigenvalues of sigma^{-1} phi, descending, via eigh(L^{-1} phi L^{-T}) with sigma = LL'."""
    if sigma.p != phi.p:
        raise DimensionMismatchError(f"Dimension mismatch: {sigma.p} vs {phi.p}")
    return generalized_eigvals(sigma.entries, phi.entries)


def log_determinant(a: SpdMatrix) -> float:
    """log det a = 2 sum log t_ii."""
    return float(2 * np.sum(np.log(np.diagonal(cholesky_factor(a.entries)))))


def determinant(a: SpdMatrix) -> float:
    return float(np.exp(log_determinant(a)))


def trace(a: SpdMatrix) -> float:
    return float(np.trace(a.entries))


def inverse(a: SpdMatrix) -> SpdMatrix:
    """a^{-1} through its Cholesky factorization."""
    factor = cho_factor(a.entries, lower=True)
    return SpdMatrix(cho_solve(factor, np.eye(a.p)))
