"""Spectral statistics of sample covariance matrices: the determinant-product
identity, the Marchenko-Pastur geometric mean and extreme log-eigenvalues."""

import math
from dataclasses import dataclass

import numpy as np

from covrisk.errors import DomainError
from covrisk.logger import get_logger
from covrisk.models.risk import SE_BAND
from covrisk.models.spectra import DetProductReport, SpectralReport
from covrisk.services.estimators import chisq_dofs
from covrisk.services.matrix_core import iwasawa_pivots, jacobi_eigh
from covrisk.services.matrix_core.kernels import FloatArray
from covrisk.services.risk_lab import mean_and_se
from covrisk.services.sampling import RngStream, run_sharded, sample_wishart_batch, stack_shard_size
from covrisk.services.special_fn import chisq_mean_log

logger = get_logger(__name__)

# Below this ratio the closed form loses digits to cancellation
_SERIES_CUTOFF = 1e-4


def det_product_check(
    p: int,
    n: int,
    replicates: int,
    rng: RngStream,
    *,
    workers: int | None = None,
    shard_size: int | None = None,
) -> DetProductReport:
    """Monte Carlo mean of prod_i l_i / (n - p + i) under W(I, n), which should be 1.

    prod_i l_i is det A, taken as the product of the Iwasawa pivots.
    """
    if p < 1 or n < p:
        raise DomainError(f"Need n >= p >= 1, got p={p}, n={n}")
    if replicates < 2:
        raise DomainError("Need at least two replicates")
    divisors = n - p + np.arange(1, p + 1, dtype=np.float64)

    def shard(stream: RngStream, size: int) -> FloatArray:
        batch = sample_wishart_batch(stream, None, n, size, p=p)
        return np.prod(iwasawa_pivots(batch.scatters) / divisors, axis=-1)

    values = np.concatenate(
        run_sharded(rng, replicates, shard, workers=workers, shard_size=stack_shard_size(p, shard_size))
    )
    mean, se = mean_and_se(values)
    passed = abs(mean - 1) <= SE_BAND * se
    logger.info("Determinant product check", p=p, n=n, replicates=replicates, mean=mean, se=se, passed=passed)
    return DetProductReport(p=p, n=n, replicates=replicates, seed=rng.seed, mean=mean, se=se, passed=passed)


def mp_geometric_mean(y: float) -> float:
    """Mean log eigenvalue of the Marchenko-Pastur law with ratio y: -1 - (1-y) log(1-y) / y.

    Equals -sum_k y^k / (k(k+1)); the limits are 0 as y -> 0 and -1 at y = 1.

    Raises:
        DomainError: If y is outside (0, 1]
    """
    if not 0 < y <= 1:
        raise DomainError(f"Ratio must lie in (0, 1], got {y}")
    if y == 1:
        return -1.0
    if y < _SERIES_CUTOFF:
        return -math.fsum(y**k / (k * (k + 1)) for k in range(1, 6))
    return -1 - (1 - y) * math.log1p(-y) / y


@dataclass(frozen=True)
class _LogEigenStats:
    mean_log: FloatArray
    log_min: FloatArray
    log_max: FloatArray


def empirical_spectral_report(
    p: int,
    n: int,
    replicates: int,
    rng: RngStream,
    *,
    workers: int | None = None,
    shard_size: int | None = None,
) -> SpectralReport:
    """Monte Carlo log-eigenvalue statistics of A / n next to their asymptotic references.

    Reports the average of log(l_i / n) over i against the Marchenko-Pastur geometric
    mean and the exact finite-n value, and E[log(min l / n)], E[log(max l / n)]
    against log(1 -+ sqrt(y))^2.
    """
    if p < 2 or n < p:
        raise DomainError(f"Need n >= p >= 2, got p={p}, n={n}")
    if replicates < 2:
        raise DomainError("Need at least two replicates")

    def shard(stream: RngStream, size: int) -> _LogEigenStats:
        batch = sample_wishart_batch(stream, None, n, size, p=p)
        eigenvalues, _ = jacobi_eigh(batch.scatters)
        logs = np.log(eigenvalues / n)
        return _LogEigenStats(mean_log=logs.mean(axis=-1), log_min=logs[:, -1], log_max=logs[:, 0])

    logger.info("Empirical spectral report", p=p, n=n, replicates=replicates, seed=rng.seed)
    parts = run_sharded(rng, replicates, shard, workers=workers, shard_size=stack_shard_size(p, shard_size))

    def collect(name: str) -> tuple[float, float]:
        return mean_and_se(np.concatenate([getattr(part, name) for part in parts]))

    mean_log, mean_log_se = collect("mean_log")
    log_min, log_min_se = collect("log_min")
    log_max, log_max_se = collect("log_max")

    y = p / n
    root = math.sqrt(y)
    warnings = []
    log_min_edge: float | None = 2 * math.log(1 - root) if y < 1 else None
    if y == 1:
        warnings.append("y = 1: the smallest eigenvalue limit is -inf and finite-size effects dominate the mean")
    finite_n = float(np.mean(np.asarray(chisq_mean_log(chisq_dofs(p, n))))) - math.log(n)

    return SpectralReport(
        p=p,
        n=n,
        replicates=replicates,
        seed=rng.seed,
        ratio=y,
        mean_log_eig=mean_log,
        mean_log_eig_se=mean_log_se,
        marchenko_pastur_reference=mp_geometric_mean(y),
        finite_n_reference=finite_n,
        mean_log_min=log_min,
        mean_log_min_se=log_min_se,
        log_min_edge=log_min_edge,
        mean_log_max=log_max,
        mean_log_max_se=log_max_se,
        log_max_edge=2 * math.log(1 + root),
        warnings=warnings,
    )
