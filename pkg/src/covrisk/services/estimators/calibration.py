"""Monte Carlo spectral calibration and its JSON persistence."""

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from covrisk.errors import CalibrationMismatchError, DomainError
from covrisk.logger import get_logger
from covrisk.models.calibration import SpectralCalibration
from covrisk.services.matrix_core import jacobi_eigh
from covrisk.services.matrix_core.kernels import FloatArray
from covrisk.services.sampling import RngStream, run_sharded, sample_wishart_batch
from covrisk.services.sampling.shards import stack_shard_size

logger = get_logger(__name__)


@dataclass(frozen=True)
class _MomentSums:
    """Per-index sums of l, l^2, log l and log^2 l over one shard."""

    count: int
    eigs: FloatArray
    eigs_sq: FloatArray
    logs: FloatArray
    logs_sq: FloatArray


def _mean_and_se(total: FloatArray, total_sq: FloatArray, count: int) -> tuple[list[float], list[float]]:
    mean = total / count
    variance = np.maximum(total_sq / count - mean * mean, 0.0) * count / max(count - 1, 1)
    return mean.tolist(), np.sqrt(variance / count).tolist()


def calibrate_spectrum(
    p: int,
    n: int,
    replicates: int,
    rng: RngStream,
    *,
    workers: int | None = None,
    shard_size: int | None = None,
    min_replicates: int | None = None,
) -> SpectralCalibration:
    """Estimate E[l_i] and E[log l_i] for the descending eigenvalues of W(I, n).

    Args:
        p: Dimension
        n: Degrees of freedom
        replicates: Number of Wishart draws
        rng: Parent stream; shard k uses ``rng.child(k)``
        workers: Thread count
        shard_size: Draws per shard
        min_replicates: Lower bound on ``replicates``, default from config

    Returns:
        Calibration with Monte Carlo standard errors

    Raises:
        DomainError: If n < p or replicates is below the minimum
    """
    from covrisk.services.config import get_config

    if p < 1 or n < p:
        raise DomainError(f"Calibration needs n >= p >= 1, got p={p}, n={n}")
    floor = min_replicates if min_replicates is not None else get_config().monte_carlo.min_calibration_replicates
    if replicates < floor:
        raise DomainError(f"Calibration needs at least {floor} replicates, got {replicates}")

    def shard(stream: RngStream, size: int) -> _MomentSums:
        batch = sample_wishart_batch(stream, None, n, size, p=p)
        eigenvalues, _ = jacobi_eigh(batch.scatters)
        logs = np.log(eigenvalues)
        return _MomentSums(
            count=size,
            eigs=eigenvalues.sum(axis=0),
            eigs_sq=(eigenvalues**2).sum(axis=0),
            logs=logs.sum(axis=0),
            logs_sq=(logs**2).sum(axis=0),
        )

    logger.info("Calibrating spectrum", p=p, n=n, replicates=replicates, seed=rng.seed)
    parts = run_sharded(rng, replicates, shard, workers=workers, shard_size=stack_shard_size(p, shard_size))

    def merged(field: str) -> FloatArray:
        return np.array([math.fsum(float(getattr(part, field)[i]) for part in parts) for i in range(p)])

    count = sum(part.count for part in parts)
    mean_eigs, mean_eigs_se = _mean_and_se(merged("eigs"), merged("eigs_sq"), count)
    mean_logs, mean_logs_se = _mean_and_se(merged("logs"), merged("logs_sq"), count)

    calibration = SpectralCalibration(
        p=p,
        n=n,
        replicates=count,
        seed=rng.seed,
        mean_log_eigs=mean_logs,
        mean_eigs=mean_eigs,
        mean_log_eigs_se=mean_logs_se,
        mean_eigs_se=mean_eigs_se,
    )
    logger.info("Calibration finished", p=p, n=n, replicates=count)
    return calibration


def save_calibration(calibration: SpectralCalibration, path: Path) -> None:
    """Write ``calibration`` as indented JSON, creating parent directories."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(calibration.model_dump_json(indent=2))
        f.write("\n")
    logger.info("Saved calibration", path=str(path), p=calibration.p, n=calibration.n)


def load_calibration(path: Path, p: int | None = None, n: int | None = None) -> SpectralCalibration:
    """Read a calibration file, refusing one computed for another (p, n).

    Raises:
        CalibrationMismatchError: If the file's (p, n) differs or it cannot be parsed
    """
    try:
        with open(path, encoding="utf-8") as f:
            calibration = SpectralCalibration.model_validate_json(f.read())
    except ValidationError as e:
        raise CalibrationMismatchError(f"Invalid calibration file {path}: {e}") from e

    if (p is not None and calibration.p != p) or (n is not None and calibration.n != n):
        raise CalibrationMismatchError(
            f"Calibration {path} is for p={calibration.p}, n={calibration.n}; requested p={p}, n={n}"
        )
    logger.info("Loaded calibration", path=str(path), p=calibration.p, n=calibration.n)
    return calibration
