"""Array kernels for dense symmetric matrix algebra.

Every kernel accepts a single matrix ``(p, p)`` or a stack ``(..., p, p)`` so
Monte Carlo shards are processed in one call. The typed wrappers in
``operations.py`` are the single-matrix case.
"""

from functools import lru_cache

import numpy as np
import numpy.typing as npt
from scipy.linalg import solve_triangular

from covrisk.errors import DimensionMismatchError, DomainError, NoConvergenceError, NotPositiveDefiniteError

FloatArray = npt.NDArray[np.float64]

JACOBI_TOLERANCE = 1e-12
JACOBI_MAX_SWEEPS = 50


def as_square_stack(a: npt.ArrayLike) -> FloatArray:
    """Copy ``a`` to float64 and check it is a (stack of) finite square matrices."""
    arr = np.array(a, dtype=np.float64, copy=True)
    if arr.ndim < 2 or arr.shape[-1] != arr.shape[-2] or arr.shape[-1] < 1:
        raise DimensionMismatchError(f"Expected square matrices, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("Matrix entries must be finite")
    return arr


def symmetrize(a: FloatArray) -> FloatArray:
    """Return (a + a')/2, which is exactly symmetric in floating point."""
    return (a + np.swapaxes(a, -1, -2)) / 2


def pd_threshold(a: FloatArray) -> FloatArray:
    """Smallest acceptable pivot: p * machine epsilon * max |a_ii|, per matrix."""
    p = a.shape[-1]
    diag = np.abs(np.diagonal(a, axis1=-2, axis2=-1))
    return p * np.finfo(np.float64).eps * np.max(diag, axis=-1)


def cholesky_factor(a: FloatArray) -> FloatArray:
    """Lower Cholesky factor T with TT' = a and a strictly positive diagonal.

    Raises:
        NotPositiveDefiniteError: If LAPACK rejects ``a`` or a pivot t_ii^2 falls below ``pd_threshold``.
    """
    try:
        factor = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefiniteError(f"Cholesky factorization failed: {e}") from e

    pivots = np.diagonal(factor, axis1=-2, axis2=-1) ** 2
    if not np.all(pivots > pd_threshold(a)[..., None]):
        raise NotPositiveDefiniteError("Cholesky pivot below the positive-definiteness tolerance")
    return factor


def iwasawa_reduce(a: FloatArray) -> tuple[FloatArray, list[FloatArray]]:
    """Full Iwasawa reduction by successive Schur complements.

    Step k removes the leading pivot of A_(k) and replaces the trailing block with
    A_(k)22 - A_(k)21 A_(k)12 / a_(k)11.

    Args:
        a: Symmetric matrix or stack of matrices

    Returns:
        Tuple of (pivots with shape (..., p), elimination vectors -A_(k)21/a_(k)11 of length p-k-1)

    Raises:
        NotPositiveDefiniteError: If any pivot is not positive
    """
    work = np.array(a, dtype=np.float64, copy=True)
    p = work.shape[-1]
    pivots = np.empty(work.shape[:-1])
    eliminations: list[FloatArray] = []

    for k in range(p):
        pivot = work[..., 0, 0]
        if not np.all(pivot > 0):
            raise NotPositiveDefiniteError(f"Iwasawa pivot {k + 1} is not positive")
        column = work[..., 1:, 0]
        pivots[..., k] = pivot
        eliminations.append(-column / pivot[..., None])
        work = work[..., 1:, 1:] - column[..., :, None] * column[..., None, :] / pivot[..., None, None]

    return pivots, eliminations


def iwasawa_pivots(a: FloatArray) -> FloatArray:
    """Diagonal of A* only."""
    return iwasawa_reduce(a)[0]


@lru_cache(maxsize=128)
def round_robin_schedule(p: int) -> tuple[tuple[npt.NDArray[np.intp], npt.NDArray[np.intp]], ...]:
    """Partition all index pairs i < j into p-1 (or p) rounds of disjoint pairs.

    Circle method: index 0 stays fixed and the others rotate one seat per round.
    Odd p gets a phantom index whose pairings are dropped.
    """
    m = p + (p % 2)
    half = m // 2
    seats = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [
            (min(a, b), max(a, b)) for a, b in zip(seats[:half], reversed(seats[half:]), strict=True) if a < p and b < p
        ]
        if pairs:
            rows = np.array([i for i, _ in pairs], dtype=np.intp)
            cols = np.array([j for _, j in pairs], dtype=np.intp)
            rounds.append((rows, cols))
        seats = [seats[0], seats[-1], *seats[1:-1]]
    return tuple(rounds)


def off_diagonal_norm(a: FloatArray) -> FloatArray:
    """Frobenius norm of the off-diagonal part, per matrix."""
    mask = ~np.eye(a.shape[-1], dtype=bool)
    return np.sqrt(np.sum(np.where(mask, a, 0.0) ** 2, axis=(-2, -1)))


def _rotate(work: FloatArray, vectors: FloatArray, rows: npt.NDArray[np.intp], cols: npt.NDArray[np.intp]) -> None:
    """Apply one round of disjoint Jacobi rotations in place: work <- J'work J, vectors <- vectors J."""
    app = work[..., rows, rows]
    aqq = work[..., cols, cols]
    apq = work[..., rows, cols]

    # t = tan(theta), smaller root of t^2 + 2 tau t - 1 = 0 with tau = (aqq - app) / (2 apq)
    diff = aqq - app
    sign = np.where(diff >= 0, 1.0, -1.0)
    denom = np.abs(diff) + np.hypot(diff, 2 * apq)
    t = np.divide(2 * apq * sign, denom, out=np.zeros_like(apq), where=denom > 0)
    c = 1 / np.sqrt(1 + t * t)
    s = t * c

    cc, sc = c[..., None, :], s[..., None, :]
    wp, wq = work[..., :, rows], work[..., :, cols]
    work[..., :, rows] = cc * wp - sc * wq
    work[..., :, cols] = sc * wp + cc * wq

    cr, sr = c[..., :, None], s[..., :, None]
    wp, wq = work[..., rows, :], work[..., cols, :]
    work[..., rows, :] = cr * wp - sr * wq
    work[..., cols, :] = sr * wp + cr * wq
    work[..., rows, cols] = 0.0
    work[..., cols, rows] = 0.0

    vp, vq = vectors[..., :, rows], vectors[..., :, cols]
    vectors[..., :, rows] = cc * vp - sc * vq
    vectors[..., :, cols] = sc * vp + cc * vq


def jacobi_eigh(
    a: npt.ArrayLike, *, tolerance: float = JACOBI_TOLERANCE, max_sweeps: int = JACOBI_MAX_SWEEPS
) -> tuple[FloatArray, FloatArray]:
    """Symmetric eigendecomposition by cyclic Jacobi rotations.

    Iterates sweeps until the off-diagonal Frobenius norm of every matrix in the
    stack is at most ``tolerance * ||a||_F``.

    Args:
        a: Symmetric matrix or stack of symmetric matrices
        tolerance: Relative off-diagonal stopping threshold
        max_sweeps: Hard cap on the number of sweeps

    Returns:
        Tuple of (eigenvalues sorted descending, eigenvectors with column i paired to eigenvalue i)

    Raises:
        NoConvergenceError: If the sweep cap is reached first
    """
    work = symmetrize(as_square_stack(a))
    p = work.shape[-1]
    vectors = np.array(np.broadcast_to(np.eye(p), work.shape), copy=True)
    threshold = tolerance * np.linalg.norm(work, axis=(-2, -1))
    schedule = round_robin_schedule(p)

    sweeps = 0
    while np.any(off_diagonal_norm(work) > threshold):
        if sweeps == max_sweeps:
            raise NoConvergenceError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")
        for rows, cols in schedule:
            _rotate(work, vectors, rows, cols)
        sweeps += 1

    eigenvalues = np.diagonal(work, axis1=-2, axis2=-1).copy()
    # Stable sort keeps the solver's column order among ties
    order = np.argsort(-eigenvalues, axis=-1, kind="stable")
    eigenvalues = np.take_along_axis(eigenvalues, order, axis=-1)
    vectors = np.take_along_axis(vectors, order[..., None, :], axis=-1)
    return eigenvalues, vectors


def inverse_factor(sigma: FloatArray) -> FloatArray:
    """L^{-1} for sigma = LL' (single matrix)."""
    factor = cholesky_factor(sigma)
    return solve_triangular(factor, np.eye(sigma.shape[-1]), lower=True)


def whiten(sigma: FloatArray, phi: FloatArray) -> FloatArray:
    """L^{-1} phi L^{-T} for sigma = LL'; ``phi`` may be a stack."""
    linv = inverse_factor(sigma)
    return symmetrize(linv @ phi @ linv.T)


def generalized_eigvals(sigma: FloatArray, phi: FloatArray) -> FloatArray:
    """Eigenvalues of sigma^{-1} phi, descending, computed on the whitened matrix."""
    eigenvalues, _ = jacobi_eigh(whiten(sigma, phi))
    if not np.all(eigenvalues > 0):
        raise NotPositiveDefiniteError("Estimate is not positive definite relative to sigma")
    return eigenvalues


def diag_embed(values: FloatArray) -> FloatArray:
    """Stack of diagonal matrices from a stack of vectors."""
    p = values.shape[-1]
    out = np.zeros((*values.shape, p))
    idx = np.arange(p)
    out[..., idx, idx] = values
    return out
