"""Wishart sampling through the Bartlett factor.

For W(I, n) the Cholesky factor T of A has independent entries:
t_ii^2 ~ chi2_{n-i+1} on the diagonal and t_ij ~ N(0, 1) below it. For W(sigma, n)
the factor is L T with sigma = LL'.
"""

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from covrisk.errors import DimensionMismatchError, DomainError
from covrisk.services.matrix_core import LowerTriangular, SpdMatrix, cholesky, cholesky_factor
from covrisk.services.matrix_core.kernels import FloatArray, symmetrize

from .rng import RngStream


@dataclass(frozen=True, eq=False)
class WishartSample:
    """A = TT' together with its Bartlett (Cholesky) factor and degrees of freedom."""

    scatter: SpdMatrix
    bartlett_factor: LowerTriangular
    n: int

    def __post_init__(self) -> None:
        if self.scatter.p != self.bartlett_factor.p:
            raise DimensionMismatchError("Scatter and Bartlett factor dimensions differ")
        _check_dof(self.p, self.n)

    @property
    def p(self) -> int:
        return self.scatter.p


@dataclass(frozen=True, eq=False)
class WishartBatch:
    """A stack of draws: ``factors[k] @ factors[k].T == scatters[k]``."""

    factors: FloatArray
    scatters: FloatArray
    n: int

    @property
    def p(self) -> int:
        return int(self.factors.shape[-1])

    def __len__(self) -> int:
        return int(self.factors.shape[0])

    def sample(self, index: int) -> WishartSample:
        return WishartSample(
            scatter=SpdMatrix(self.scatters[index]),
            bartlett_factor=LowerTriangular(self.factors[index]),
            n=self.n,
        )


def _check_dof(p: int, n: int) -> None:
    if p < 1:
        raise DomainError(f"Dimension must be at least 1, got {p}")
    if n < p:
        raise DomainError(f"Wishart sampling needs n >= p, got n={n}, p={p}")


def sample_std_normal(rng: RngStream) -> float:
    """One N(0, 1) draw (ziggurat)."""
    return float(rng.generator.standard_normal())


def sample_chisq(rng: RngStream, dof: float) -> float:
    """One chi-square draw with ``dof`` degrees of freedom.

    Raises:
        DomainError: If dof <= 0
    """
    if not dof > 0:
        raise DomainError(f"Degrees of freedom must be positive, got {dof}")
    return float(rng.generator.chisquare(dof))


def sample_bartlett_factors(rng: RngStream, p: int, n: int, size: int) -> FloatArray:
    """``size`` Bartlett factors of W(I, n), shape (size, p, p).

    The diagonal block is drawn first, then the strictly lower normals row by row.
    """
    _check_dof(p, n)
    if size < 1:
        raise DomainError(f"size must be positive, got {size}")

    generator = rng.generator
    dofs = n - np.arange(p, dtype=np.float64)
    diagonal = np.sqrt(generator.chisquare(dofs, size=(size, p)))

    rows, cols = np.tril_indices(p, k=-1)
    factors = np.zeros((size, p, p))
    factors[:, rows, cols] = generator.standard_normal((size, rows.size))
    idx = np.arange(p)
    factors[:, idx, idx] = diagonal
    return factors


def sample_wishart_batch(
    rng: RngStream, sigma: SpdMatrix | None, n: int, size: int, p: int | None = None
) -> WishartBatch:
    """``size`` draws of W(sigma, n); ``sigma=None`` means the identity of dimension ``p``."""
    if sigma is None:
        if p is None:
            raise DomainError("Either sigma or p is required")
    elif p is not None and p != sigma.p:
        raise DimensionMismatchError(f"p={p} does not match sigma of dimension {sigma.p}")
    dim = sigma.p if sigma is not None else p
    assert dim is not None

    factors = sample_bartlett_factors(rng, dim, n, size)
    if sigma is not None:
        factors = cholesky(sigma).entries @ factors
    scatters = symmetrize(factors @ np.swapaxes(factors, -1, -2))
    return WishartBatch(factors=factors, scatters=scatters, n=n)


def sample_wishart_identity(rng: RngStream, p: int, n: int) -> WishartSample:
    """One W(I, n) draw.

    Raises:
        DomainError: If n < p
    """
    return sample_wishart_batch(rng, None, n, 1, p=p).sample(0)


def sample_wishart(rng: RngStream, sigma: SpdMatrix, n: int) -> WishartSample:
    """One W(sigma, n) draw: A = L T T' L' with sigma = LL'.

    With sigma = I this consumes the stream exactly like ``sample_wishart_identity``.
    """
    return sample_wishart_batch(rng, sigma, n, 1).sample(0)


def sample_normal_data(rng: RngStream, sigma: SpdMatrix, n: int) -> FloatArray:
    """n x p matrix whose rows are i.i.d. N_p(0, sigma)."""
    if n < 1:
        raise DomainError(f"Need at least one observation, got n={n}")
    z = rng.generator.standard_normal((n, sigma.p))
    return z @ cholesky(sigma).entries.T


def scatter_from_data(x: npt.ArrayLike) -> WishartSample:
    """A = sum_i x_i x_i' over the rows of ``x``, with its Cholesky factor.

    Raises:
        DomainError: If there are fewer rows than columns
        NotPositiveDefiniteError: If the rows do not span R^p
    """
    data = np.asarray(x, dtype=np.float64)
    if data.ndim != 2:
        raise DimensionMismatchError(f"Expected an n x p data matrix, got shape {data.shape}")
    n, p = data.shape
    _check_dof(p, n)
    scatter = symmetrize(data.T @ data)
    return WishartSample(scatter=SpdMatrix(scatter), bartlett_factor=LowerTriangular(cholesky_factor(scatter)), n=n)
