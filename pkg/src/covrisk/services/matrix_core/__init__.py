"""Dense symmetric matrix algebra: Cholesky, full Iwasawa reduction, Jacobi eigensolver."""

from .kernels import (
    JACOBI_MAX_SWEEPS,
    JACOBI_TOLERANCE,
    cholesky_factor,
    diag_embed,
    generalized_eigvals,
    iwasawa_pivots,
    iwasawa_reduce,
    jacobi_eigh,
    whiten,
)
from .operations import (
    cholesky,
    congruence,
    determinant,
    eigh,
    generalized_eigenvalues,
    inverse,
    iwasawa_full,
    log_determinant,
    to_starred,
    trace,
)
from .types import EigenDecomposition, IwasawaResult, LowerTriangular, SpdMatrix

__all__ = [
    "JACOBI_MAX_SWEEPS",
    "JACOBI_TOLERANCE",
    "EigenDecomposition",
    "IwasawaResult",
    "LowerTriangular",
    "SpdMatrix",
    "cholesky",
    "cholesky_factor",
    "congruence",
    "determinant",
    "diag_embed",
    "eigh",
    "generalized_eigenvalues",
    "generalized_eigvals",
    "inverse",
    "iwasawa_full",
    "iwasawa_pivots",
    "iwasawa_reduce",
    "jacobi_eigh",
    "log_determinant",
    "to_starred",
    "trace",
    "whiten",
]
