"""Tests for the dense symmetric matrix kernels and typed operations."""

import numpy as np
import pytest

from covrisk.errors import DimensionMismatchError, DomainError, NotPositiveDefiniteError
from covrisk.services.matrix_core import (
    LowerTriangular,
    SpdMatrix,
    cholesky,
    congruence,
    determinant,
    eigh,
    generalized_eigenvalues,
    inverse,
    iwasawa_full,
    iwasawa_pivots,
    jacobi_eigh,
    log_determinant,
    to_starred,
    trace,
)
from covrisk.services.matrix_core.kernels import round_robin_schedule


def _random_spd(p: int, seed: int = 0) -> SpdMatrix:
    generator = np.random.default_rng(seed)
    x = generator.standard_normal((p + 3, p))
    return SpdMatrix(x.T @ x + 0.1 * np.eye(p))


def test_cholesky_of_known_matrix() -> None:
    """Test the Cholesky factor of a small matrix with a known answer."""
    a = SpdMatrix([[4.0, 2.0], [2.0, 3.0]])

    factor = cholesky(a).entries

    np.testing.assert_allclose(factor, [[2.0, 0.0], [1.0, np.sqrt(2.0)]], rtol=1e-14)
    np.testing.assert_allclose(factor @ factor.T, a.entries, rtol=1e-14)


def test_cholesky_factor_is_lower_with_positive_diagonal() -> None:
    """Test TT' reconstructs A for a random SPD matrix."""
    a = _random_spd(5)

    factor = cholesky(a)

    assert np.all(np.triu(factor.entries, k=1) == 0)
    assert np.all(factor.diagonal > 0)
    assert factor.gram().allclose(a, rtol=1e-12, atol=1e-12)


def test_spd_matrix_rejects_indefinite_input() -> None:
    """Test that an indefinite matrix raises NotPositiveDefiniteError."""
    with pytest.raises(NotPositiveDefiniteError):
        SpdMatrix([[1.0, 2.0], [2.0, 1.0]])


def test_spd_matrix_rejects_non_square_and_non_finite() -> None:
    """Test shape and finiteness validation."""
    with pytest.raises(DimensionMismatchError):
        SpdMatrix(np.ones((2, 3)))
    with pytest.raises(DomainError):
        SpdMatrix([[1.0, np.nan], [np.nan, 1.0]])


def test_spd_matrix_symmetrizes_and_freezes() -> None:
    """Test that the stored entries are the symmetric part and read-only."""
    a = SpdMatrix([[2.0, 0.5 + 1e-12], [0.5, 2.0]])

    assert a.entries[0, 1] == a.entries[1, 0]
    with pytest.raises(ValueError):
        a.entries[0, 0] = 5.0


def test_lower_triangular_validation() -> None:
    """Test that upper entries and non-positive diagonals are rejected."""
    with pytest.raises(DomainError):
        LowerTriangular([[1.0, 1.0], [0.0, 1.0]])
    with pytest.raises(DomainError):
        LowerTriangular([[1.0, 0.0], [0.5, 0.0]])


def test_iwasawa_pivots_equal_squared_cholesky_diagonal() -> None:
    """Test that the Schur-complement pivots are t_ii^2."""
    a = _random_spd(6, seed=3)

    pivots = iwasawa_full(a).pivots
    diagonal = cholesky(a).diagonal

    np.testing.assert_allclose(pivots, diagonal**2, rtol=1e-12)


def test_iwasawa_reconstruction() -> None:
    """Test that L diag(pivots) L' rebuilds A from the elimination history."""
    a = _random_spd(4, seed=5)

    result = iwasawa_full(a)

    assert len(result.eliminations) == 4
    assert [e.shape for e in result.eliminations] == [(3,), (2,), (1,), (0,)]
    assert result.reconstruct().allclose(a, rtol=1e-12, atol=1e-12)


def test_iwasawa_of_diagonal_is_identity_map() -> None:
    """Test that a diagonal matrix is its own starred representative."""
    a = SpdMatrix.from_diagonal([3.0, 2.0, 0.5])

    assert to_starred(a).allclose(a)


def test_iwasawa_pivots_on_stack() -> None:
    """Test the batched kernel against the single-matrix one."""
    stack = np.stack([_random_spd(3, seed=k).entries for k in range(4)])

    pivots = iwasawa_pivots(stack)

    assert pivots.shape == (4, 3)
    for k in range(4):
        np.testing.assert_allclose(pivots[k], iwasawa_full(SpdMatrix(stack[k])).pivots, rtol=1e-14)


def test_round_robin_schedule_covers_each_pair_once() -> None:
    """Test that every pair i < j appears in exactly one round, with disjoint pairs per round."""
    for p in (2, 3, 6, 7):
        seen = []
        for rows, cols in round_robin_schedule(p):
            indices = np.concatenate([rows, cols])
            assert len(set(indices.tolist())) == indices.size
            seen.extend(zip(rows.tolist(), cols.tolist(), strict=True))
        assert sorted(seen) == [(i, j) for i in range(p) for j in range(i + 1, p)]


def test_jacobi_matches_lapack() -> None:
    """Test Jacobi eigenvalues against numpy.linalg.eigvalsh."""
    a = _random_spd(8, seed=11)

    decomposition = eigh(a)

    expected = np.sort(np.linalg.eigvalsh(a.entries))[::-1]
    np.testing.assert_allclose(decomposition.eigenvalues, expected, rtol=1e-10)
    np.testing.assert_allclose(decomposition.reconstruct(), a.entries, rtol=1e-10, atol=1e-10)
    u = decomposition.eigenvectors
    np.testing.assert_allclose(u.T @ u, np.eye(8), atol=1e-10)


def test_jacobi_handles_stacks_and_indefinite_input() -> None:
    """Test the batched solver, including an indefinite symmetric matrix."""
    stack = np.array([[[2.0, 1.0], [1.0, 2.0]], [[1.0, 2.0], [2.0, 1.0]]])

    eigenvalues, _ = jacobi_eigh(stack)

    np.testing.assert_allclose(eigenvalues, [[3.0, 1.0], [3.0, -1.0]], atol=1e-12)


def test_eigh_requires_symmetric_array() -> None:
    """Test that plain arrays must be symmetric."""
    with pytest.raises(DomainError):
        eigh([[1.0, 2.0], [0.0, 1.0]])


def test_eigh_of_repeated_eigenvalues() -> None:
    """Test that ties are returned in place and converge immediately."""
    decomposition = eigh(SpdMatrix(np.eye(3) * 2.0))

    np.testing.assert_array_equal(decomposition.eigenvalues, [2.0, 2.0, 2.0])


def test_generalized_eigenvalues_are_congruence_invariant() -> None:
    """Test that eig(sigma^-1 phi) is unchanged by phi, sigma -> g phi g', g sigma g'."""
    sigma = _random_spd(4, seed=1)
    phi = _random_spd(4, seed=2)
    g = np.random.default_rng(9).standard_normal((4, 4)) + 3 * np.eye(4)

    before = generalized_eigenvalues(sigma, phi)
    after = generalized_eigenvalues(congruence(sigma, g), congruence(phi, g))

    np.testing.assert_allclose(before, after, rtol=1e-9)
    expected = np.sort(np.linalg.eigvals(np.linalg.solve(sigma.entries, phi.entries)).real)[::-1]
    np.testing.assert_allclose(before, expected, rtol=1e-9)


def test_determinant_trace_and_inverse() -> None:
    """Test scalar summaries against numpy."""
    a = _random_spd(5, seed=4)

    assert log_determinant(a) == pytest.approx(np.linalg.slogdet(a.entries)[1], rel=1e-12)
    assert determinant(a) == pytest.approx(np.linalg.det(a.entries), rel=1e-10)
    assert trace(a) == pytest.approx(np.trace(a.entries))
    np.testing.assert_allclose(inverse(a).entries @ a.entries, np.eye(5), atol=1e-10)


def test_congruence_shape_check() -> None:
    """Test that the transform must be p x p."""
    with pytest.raises(DimensionMismatchError):
        congruence(SpdMatrix.identity(3), np.eye(2))
