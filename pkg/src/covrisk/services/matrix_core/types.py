"""Immutable matrix value types.

Arrays are copied on construction and frozen (``writeable=False``), so values are
safe to share between worker threads.
"""

from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from covrisk.errors import DimensionMismatchError, DomainError, NotPositiveDefiniteError

from .kernels import FloatArray, as_square_stack, cholesky_factor, diag_embed, symmetrize


def _frozen(a: npt.ArrayLike) -> FloatArray:
    arr = np.array(a, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SpdMatrix:
    """Symmetric positive definite p x p matrix.

    Symmetry is enforced by replacing the input with (M + M')/2; positive
    definiteness is checked with a Cholesky factorization.
    """

    entries: FloatArray

    def __post_init__(self) -> None:
        arr = as_square_stack(self.entries)
        if arr.ndim != 2:
            raise DimensionMismatchError(f"SpdMatrix needs a single p x p matrix, got shape {arr.shape}")
        arr = symmetrize(arr)
        cholesky_factor(arr)
        object.__setattr__(self, "entries", _frozen(arr))

    @property
    def p(self) -> int:
        return int(self.entries.shape[0])

    @property
    def diagonal(self) -> FloatArray:
        return np.diagonal(self.entries).copy()

    @classmethod
    def identity(cls, p: int) -> "SpdMatrix":
        return cls(np.eye(p))

    @classmethod
    def from_diagonal(cls, values: npt.ArrayLike) -> "SpdMatrix":
        return cls(diag_embed(np.asarray(values, dtype=np.float64)))

    def allclose(self, other: "SpdMatrix", rtol: float = 1e-10, atol: float = 0.0) -> bool:
        return self.p == other.p and bool(np.allclose(self.entries, other.entries, rtol=rtol, atol=atol))


@dataclass(frozen=True, eq=False)
class LowerTriangular:
    """Lower-triangular matrix with a strictly positive diagonal (an element of G+_T)."""

    entries: FloatArray

    def __post_init__(self) -> None:
        arr = as_square_stack(self.entries)
        if arr.ndim != 2:
            raise DimensionMismatchError(f"LowerTriangular needs a single p x p matrix, got shape {arr.shape}")
        if np.any(np.triu(arr, k=1) != 0):
            raise DomainError("Entries above the diagonal must be zero")
        if not np.all(np.diagonal(arr) > 0):
            raise DomainError("Diagonal entries must be strictly positive")
        object.__setattr__(self, "entries", _frozen(arr))

    @property
    def p(self) -> int:
        return int(self.entries.shape[0])

    @property
    def diagonal(self) -> FloatArray:
        return np.diagonal(self.entries).copy()

    def gram(self) -> SpdMatrix:
        """TT'."""
        return SpdMatrix(self.entries @ self.entries.T)


@dataclass(frozen=True, eq=False)
class IwasawaResult:
    """Pivots of the full Iwasawa reduction plus the elimination history.

    ``eliminations[k]`` is -A_(k)21 / a_(k)11, of length p - k - 1.
    """

    pivots: FloatArray
    eliminations: tuple[FloatArray, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        pivots = _frozen(self.pivots)
        if pivots.ndim != 1:
            raise DimensionMismatchError("Pivots must be a vector")
        if not np.all(pivots > 0):
            raise NotPositiveDefiniteError("Iwasawa pivots must be positive")
        p = pivots.shape[0]
        elims = tuple(_frozen(e) for e in self.eliminations)
        if elims and [e.shape for e in elims] != [(p - k - 1,) for k in range(p)]:
            raise DimensionMismatchError("Elimination vectors do not match the pivot count")
        object.__setattr__(self, "pivots", pivots)
        object.__setattr__(self, "eliminations", elims)

    @property
    def p(self) -> int:
        return int(self.pivots.shape[0])

    def unit_lower(self) -> FloatArray:
        """Unit lower-triangular L with A = L diag(pivots) L'."""
        p = self.p
        lower = np.eye(p)
        for k, elim in enumerate(self.eliminations):
            lower[k + 1 :, k] = -elim
        return lower

    def reconstruct(self) -> SpdMatrix:
        """Rebuild the reduced matrix from pivots and eliminations."""
        lower = self.unit_lower()
        return SpdMatrix(lower @ np.diag(self.pivots) @ lower.T)

    def starred(self) -> SpdMatrix:
        """A* = Diag(a_(1)11, ..., a_(p)11)."""
        return SpdMatrix.from_diagonal(self.pivots)


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Eigenvalues sorted descending with paired eigenvector columns."""

    eigenvalues: FloatArray
    eigenvectors: FloatArray

    def __post_init__(self) -> None:
        values = _frozen(self.eigenvalues)
        vectors = _frozen(self.eigenvectors)
        if values.ndim != 1 or vectors.shape != (values.shape[0], values.shape[0]):
            raise DimensionMismatchError("Eigenvector matrix must be p x p for p eigenvalues")
        object.__setattr__(self, "eigenvalues", values)
        object.__setattr__(self, "eigenvectors", vectors)

    @property
    def p(self) -> int:
        return int(self.eigenvalues.shape[0])

    def reconstruct(self) -> FloatArray:
        """U L U'."""
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.T
