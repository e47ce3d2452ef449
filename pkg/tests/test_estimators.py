"""Tests for the estimators, their correction constants and spectral calibration."""

import json
import math
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

from covrisk.errors import CalibrationMismatchError, DimensionMismatchError, DomainError, MissingCalibrationError
from covrisk.models.calibration import SpectralCalibration
from covrisk.models.risk import EstimatorKind
from covrisk.services.estimators import (
    calibrate_spectrum,
    chisq_dofs,
    estimate,
    estimate_batch,
    geodesic_cholesky,
    geodesic_iwasawa,
    geodesic_multipliers,
    iwasawa_best,
    iwasawa_divisors,
    load_calibration,
    mle,
    rot_eq_geodesic,
    rot_eq_stein,
    save_calibration,
    stein_divisors,
    stein_estimator,
)
from covrisk.services.matrix_core import cholesky, iwasawa_full, jacobi_eigh
from covrisk.services.sampling import RngStream, WishartSample, sample_wishart_batch, scatter_from_data
from covrisk.services.special_fn import chisq_mean_log, chisq_var_log


def _sample(p: int, n: int, seed: int = 0) -> WishartSample:
    x = np.random.default_rng(seed).standard_normal((n, p))
    return scatter_from_data(x)


def _calibration(p: int = 3, n: int = 10) -> SpectralCalibration:
    """A hand-made calibration that satisfies the model's invariants."""
    mean_eigs = [float(n + p - 2 * i) for i in range(p)]
    return SpectralCalibration(
        p=p,
        n=n,
        replicates=1000,
        seed=0,
        mean_log_eigs=[math.log(m) - 0.1 for m in mean_eigs],
        mean_eigs=mean_eigs,
        mean_log_eigs_se=[0.01] * p,
        mean_eigs_se=[0.01] * p,
    )


def test_correction_constants() -> None:
    """Test the divisors and multipliers at p = 3, n = 10."""
    np.testing.assert_array_equal(chisq_dofs(3, 10), [10.0, 9.0, 8.0])
    np.testing.assert_array_equal(stein_divisors(3, 10), [12.0, 10.0, 8.0])
    np.testing.assert_array_equal(iwasawa_divisors(3, 10), [10.0, 9.0, 8.0])
    assert geodesic_multipliers(1, 10)[0] == pytest.approx(math.exp(-2.1992648489917456), rel=1e-12)
    with pytest.raises(DomainError):
        stein_divisors(4, 3)


def test_mle_is_scatter_over_n() -> None:
    sample = _sample(3, 8)

    np.testing.assert_allclose(mle(sample).entries, sample.scatter.entries / 8, rtol=1e-14)


def test_stein_estimator_formula() -> None:
    """Test T diag(1/(n+p-2i+1)) T'."""
    sample = _sample(3, 9, seed=1)
    t = sample.bartlett_factor.entries

    expected = t @ np.diag(1 / stein_divisors(3, 9)) @ t.T

    np.testing.assert_allclose(stein_estimator(sample).entries, expected, rtol=1e-12)


def test_diagonal_estimators_use_iwasawa_pivots() -> None:
    """Test IwasawaBest and GeodesicIwasawa are diagonal in the pivots."""
    sample = _sample(3, 7, seed=2)
    pivots = iwasawa_full(sample.scatter).pivots

    np.testing.assert_allclose(iwasawa_best(sample).entries, np.diag(pivots / iwasawa_divisors(3, 7)), rtol=1e-12)
    np.testing.assert_allclose(
        geodesic_iwasawa(sample).entries, np.diag(pivots * geodesic_multipliers(3, 7)), rtol=1e-12
    )


def test_geodesic_cholesky_rescales_the_factor_diagonal() -> None:
    """Test that the Cholesky factor of the estimate has diagonal t_ii sqrt(d_i) and unchanged ratios below it."""
    sample = _sample(3, 6, seed=3)
    t = sample.bartlett_factor.entries
    multipliers = geodesic_multipliers(3, 6)

    factor = cholesky(geodesic_cholesky(sample)).entries

    np.testing.assert_allclose(np.diag(factor), np.diag(t) * np.sqrt(multipliers), rtol=1e-10)
    np.testing.assert_allclose(np.tril(factor, k=-1), np.tril(t, k=-1), rtol=1e-10, atol=1e-12)


def test_geodesic_estimators_share_pivots() -> None:
    """Test that GeodesicCholesky's pivots equal GeodesicIwasawa's diagonal."""
    sample = _sample(4, 9, seed=4)

    pivots = iwasawa_full(geodesic_cholesky(sample)).pivots

    np.testing.assert_allclose(pivots, np.diag(geodesic_iwasawa(sample).entries), rtol=1e-10)


def test_stein_estimator_is_lower_triangular_equivariant() -> None:
    """Test phi(G A G') = G phi(A) G' for G lower triangular with a positive diagonal."""
    x = np.random.default_rng(5).standard_normal((8, 3))
    g = np.array([[2.0, 0.0, 0.0], [0.5, 1.0, 0.0], [-1.0, 0.3, 0.7]])

    base = stein_estimator(scatter_from_data(x)).entries
    moved = stein_estimator(scatter_from_data(x @ g.T)).entries

    np.testing.assert_allclose(moved, g @ base @ g.T, rtol=1e-10, atol=1e-12)


def test_rotation_equivariant_estimators_keep_eigenvectors() -> None:
    """Test U diag(m_i l_i) U' and orthogonal equivariance."""
    cal = _calibration()
    x = np.random.default_rng(6).standard_normal((10, 3))
    q, _ = np.linalg.qr(np.random.default_rng(7).standard_normal((3, 3)))
    sample = scatter_from_data(x)

    eigenvalues = np.sort(np.linalg.eigvalsh(sample.scatter.entries))[::-1]
    stein_values = np.sort(np.linalg.eigvalsh(rot_eq_stein(sample, cal).entries))[::-1]
    geodesic_values = np.sort(np.linalg.eigvalsh(rot_eq_geodesic(sample, cal).entries))[::-1]

    np.testing.assert_allclose(stein_values, np.sort(eigenvalues * cal.stein_multipliers)[::-1], rtol=1e-10)
    np.testing.assert_allclose(geodesic_values, np.sort(eigenvalues * cal.geodesic_multipliers)[::-1], rtol=1e-10)

    rotated = rot_eq_geodesic(scatter_from_data(x @ q.T), cal).entries
    np.testing.assert_allclose(rotated, q @ rot_eq_geodesic(sample, cal).entries @ q.T, rtol=1e-8, atol=1e-10)


def test_rotation_equivariant_estimators_need_matching_calibration() -> None:
    sample = _sample(3, 10)

    with pytest.raises(MissingCalibrationError):
        estimate(EstimatorKind.ROT_EQ_STEIN, sample)
    with pytest.raises(CalibrationMismatchError):
        rot_eq_stein(sample, _calibration(3, 11))
    with pytest.raises(DimensionMismatchError):
        rot_eq_geodesic(sample, _calibration(2, 10))


def test_batch_kernels_match_single_estimates() -> None:
    """Test that every batch kernel agrees with the single-sample estimator."""
    cal = _calibration(2, 6)
    batch = sample_wishart_batch(RngStream(2), None, 6, 4, p=2)

    for kind in EstimatorKind:
        stack = estimate_batch(kind, batch, cal)
        for k in range(len(batch)):
            np.testing.assert_allclose(stack[k], estimate(kind, batch.sample(k), cal).entries, rtol=1e-12, atol=1e-12)


def test_mean_based_estimators_are_unbiased_for_pivots() -> None:
    """Test E[MLE] = I and E[IwasawaBest] = I at sigma = I."""
    batch = sample_wishart_batch(RngStream(21), None, 7, 20_000, p=3)

    for kind in (EstimatorKind.MLE, EstimatorKind.IWASAWA_BEST):
        stack = estimate_batch(kind, batch)
        diagonal = np.diagonal(stack, axis1=-2, axis2=-1)
        se = diagonal.std(axis=0, ddof=1) / math.sqrt(len(batch))
        assert np.all(np.abs(diagonal.mean(axis=0) - 1) <= 5 * se)


def test_calibration_moments_at_p1() -> None:
    """Test that p = 1 calibration recovers E[chi2_n] and E[log chi2_n]."""
    cal = calibrate_spectrum(1, 10, 20_000, RngStream(8), workers=1)

    assert cal.replicates == 20_000
    assert abs(cal.mean_eigs[0] - 10) <= 5 * cal.mean_eigs_se[0]
    assert abs(cal.mean_log_eigs[0] - 2.1992648489917456) <= 5 * cal.mean_log_eigs_se[0]


def test_calibration_trace_and_ordering() -> None:
    """Test sum_i E[l_i] = pn within tolerance and the stored invariants."""
    p, n, replicates = 3, 8, 10_000
    cal = calibrate_spectrum(p, n, replicates, RngStream(9), workers=2, shard_size=1_000)

    assert abs(sum(cal.mean_eigs) - p * n) <= 5 * math.sqrt(2 * p * n / replicates)
    assert all(a > b for a, b in zip(cal.mean_log_eigs, cal.mean_log_eigs[1:], strict=False))
    assert np.all(cal.stein_multipliers <= cal.geodesic_multipliers)


def test_calibration_is_independent_of_workers() -> None:
    a = calibrate_spectrum(2, 5, 10_000, RngStream(4), workers=1, shard_size=2_500)
    b = calibrate_spectrum(2, 5, 10_000, RngStream(4), workers=4, shard_size=2_500)

    assert a.model_dump() == b.model_dump()


def test_calibration_minimum_replicates() -> None:
    """Test that small runs are refused unless the minimum is lowered."""
    with pytest.raises(DomainError):
        calibrate_spectrum(2, 5, 500, RngStream(1))
    assert calibrate_spectrum(2, 5, 500, RngStream(1), min_replicates=100).replicates == 500


def test_calibration_save_and_load(tmp_path: Path) -> None:
    """Test the JSON file round trip and the (p, n) guard."""
    cal = _calibration()
    path = tmp_path / "cal" / "calibration.json"

    save_calibration(cal, path)
    loaded = load_calibration(path, 3, 10)

    assert loaded == cal
    assert json.loads(path.read_text(encoding="utf-8"))["format_version"] == 1
    with pytest.raises(CalibrationMismatchError):
        load_calibration(path, 3, 11)


def test_corrupt_calibration_file_is_rejected(tmp_path: Path) -> None:
    path = tmp_path / "calibration.json"
    data = _calibration().model_dump()
    data["mean_log_eigs"] = list(reversed(data["mean_log_eigs"]))
    path.write_text(json.dumps(data), encoding="utf-8")

    with pytest.raises(CalibrationMismatchError):
        load_calibration(path, 3, 10)


def test_calibration_model_checks_jensen() -> None:
    """Test that exp(E[log l]) > E[l] is refused."""
    data = _calibration().model_dump()
    data["mean_log_eigs"] = [math.log(m) + 0.1 for m in data["mean_eigs"]]

    with pytest.raises(ValidationError):
        SpectralCalibration(**data)


def test_calibration_log_sum_rule() -> None:
    """Test sum_i E[log l_i] = E[log det A] = sum_i E[log chi2_{n-i+1}]."""
    p, n, replicates = 3, 8, 10_000
    dofs = chisq_dofs(p, n)
    cal = calibrate_spectrum(p, n, replicates, RngStream(12), workers=2)

    expected = float(np.sum(chisq_mean_log(dofs)))
    se = math.sqrt(float(np.sum(chisq_var_log(dofs))) / replicates)

    assert abs(sum(cal.mean_log_eigs) - expected) <= 5 * se


def test_geodesic_iwasawa_centers_log_pivots() -> None:
    """Test E[log (d_i a_(i)11)] = 0 for the GeodesicIwasawa diagonal."""
    batch = sample_wishart_batch(RngStream(13), None, 8, 20_000, p=3)

    logs = np.log(np.diagonal(estimate_batch(EstimatorKind.GEODESIC_IWASAWA, batch), axis1=-2, axis2=-1))
    se = logs.std(axis=0, ddof=1) / math.sqrt(len(batch))

    assert np.all(np.abs(logs.mean(axis=0)) <= 5 * se)


def test_rotation_equivariant_rescale_centers_eigenvalues() -> None:
    """Test E[m_i l_i] = 1 for RotEqStein and E[log(m_i l_i)] = 0 for RotEqGeodesic on fresh samples."""
    p, n, replicates = 3, 8, 20_000
    cal = calibrate_spectrum(p, n, replicates, RngStream(14), workers=2)
    batch = sample_wishart_batch(RngStream(15), None, n, replicates, p=p)
    _, vectors = jacobi_eigh(batch.scatters)

    def rescaled(kind: EstimatorKind) -> np.ndarray:
        stack = estimate_batch(kind, batch, cal)
        return np.diagonal(np.swapaxes(vectors, -1, -2) @ stack @ vectors, axis1=-2, axis2=-1)

    stein = rescaled(EstimatorKind.ROT_EQ_STEIN)
    stein_se = np.hypot(
        stein.std(axis=0, ddof=1) / math.sqrt(replicates), np.asarray(cal.mean_eigs_se) / np.asarray(cal.mean_eigs)
    )
    assert np.all(np.abs(stein.mean(axis=0) - 1) <= 5 * stein_se)

    logs = np.log(rescaled(EstimatorKind.ROT_EQ_GEODESIC))
    log_se = np.hypot(logs.std(axis=0, ddof=1) / math.sqrt(replicates), np.asarray(cal.mean_log_eigs_se))
    assert np.all(np.abs(logs.mean(axis=0)) <= 5 * log_se)


def test_all_estimators_collapse_to_scalars_at_p1() -> None:
    """Test a / n for the mean-based trio, a exp(-E[log chi2_n]) for the geodesic pair, and calibrated scalings."""
    sample = _sample(1, 10, seed=16)
    cal = _calibration(1, 10)
    a = float(sample.scatter.entries[0, 0])
    geodesic = a * math.exp(-float(chisq_mean_log(10.0)))
    expected = {
        EstimatorKind.MLE: a / 10,
        EstimatorKind.STEIN: a / 10,
        EstimatorKind.IWASAWA_BEST: a / 10,
        EstimatorKind.GEODESIC_IWASAWA: geodesic,
        EstimatorKind.GEODESIC_CHOLESKY: geodesic,
        EstimatorKind.ROT_EQ_STEIN: a / cal.mean_eigs[0],
        EstimatorKind.ROT_EQ_GEODESIC: a * math.exp(-cal.mean_log_eigs[0]),
    }

    for kind, value in expected.items():
        assert estimate(kind, sample, cal).entries[0, 0] == pytest.approx(value, rel=1e-12)
