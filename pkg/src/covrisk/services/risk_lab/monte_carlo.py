"""Monte Carlo risk estimation.

Shard k of every run draws from ``rng.child(k)``, so two runs with equal streams
and shard plans evaluate identical samples (common random numbers).
"""

import math

import numpy as np

from covrisk.errors import DomainError
from covrisk.logger import get_logger
from covrisk.models.calibration import SpectralCalibration
from covrisk.models.risk import Coordinates, EstimatorKind, LossKind, RiskReport
from covrisk.services.estimators import estimate_batch, require_calibration
from covrisk.services.losses import batch_loss
from covrisk.services.matrix_core import SpdMatrix
from covrisk.services.matrix_core.kernels import FloatArray
from covrisk.services.sampling import RngStream, run_sharded, sample_wishart_batch, stack_shard_size

from .analytic import analytic_risk, default_coordinates

logger = get_logger(__name__)


def mean_and_se(samples: FloatArray) -> tuple[float, float]:
    """Sample mean and its standard error sd / sqrt(N), both from exactly rounded sums.

    The sums do not depend on how the samples were split into shards.
    """
    count = samples.shape[0]
    if count < 2:
        raise DomainError("Need at least two replicates for a standard error")
    values = samples.tolist()
    mean = math.fsum(values) / count
    variance = math.fsum((value - mean) ** 2 for value in values) / (count - 1)
    return mean, math.sqrt(variance / count)


def loss_samples(
    kind: EstimatorKind,
    loss: LossKind,
    p: int,
    n: int,
    replicates: int,
    rng: RngStream,
    cal: SpectralCalibration | None = None,
    *,
    sigma: SpdMatrix | None = None,
    coordinates: Coordinates | None = None,
    workers: int | None = None,
    shard_size: int | None = None,
) -> tuple[FloatArray, Coordinates]:
    """Per-replicate losses of ``kind`` at sigma (identity when None), in shard order.

    Raises:
        DomainError: If n < p, or full coordinates are requested for a diagonal estimator
        MissingCalibrationError: If a rotation-equivariant kind has no calibration
    """
    if p < 1 or n < p:
        raise DomainError(f"Need n >= p >= 1, got p={p}, n={n}")
    if sigma is not None and sigma.p != p:
        raise DomainError(f"sigma has dimension {sigma.p}, expected {p}")
    if kind.needs_calibration:
        require_calibration(cal, p, n)
    frame = coordinates or default_coordinates(kind, loss)
    if kind.is_diagonal and frame is not Coordinates.STARRED:
        raise DomainError(f"{kind.value} estimates sigma* and is evaluated in starred coordinates only")

    def shard(stream: RngStream, size: int) -> FloatArray:
        batch = sample_wishart_batch(stream, sigma, n, size, p=p)
        return batch_loss(loss, estimate_batch(kind, batch, cal), sigma, frame)

    parts = run_sharded(rng, replicates, shard, workers=workers, shard_size=stack_shard_size(p, shard_size))
    return np.concatenate(parts), frame


def report_from_samples(
    kind: EstimatorKind, loss: LossKind, p: int, n: int, samples: FloatArray, frame: Coordinates, seed: int
) -> RiskReport:
    """Summarize per-replicate losses, attaching the closed form when it holds in ``frame``."""
    mc_mean, mc_se = mean_and_se(samples)
    analytic, formula, reference = None, None, None
    closed_form = analytic_risk(kind, loss, p, n)
    if closed_form is not None and closed_form[1].frame is frame:
        analytic, formula, reference = closed_form[0], closed_form[1].tag, closed_form[1].reference
    return RiskReport(
        estimator=kind,
        loss=loss,
        p=p,
        n=n,
        analytic=analytic,
        formula=formula,
        reference=reference,
        mc_mean=mc_mean,
        mc_se=mc_se,
        replicates=int(samples.shape[0]),
        seed=seed,
        coordinates=frame,
    )


def mc_risk(
    kind: EstimatorKind,
    loss: LossKind,
    p: int,
    n: int,
    replicates: int,
    rng: RngStream,
    cal: SpectralCalibration | None = None,
    *,
    sigma: SpdMatrix | None = None,
    coordinates: Coordinates | None = None,
    workers: int | None = None,
    shard_size: int | None = None,
    min_replicates: int | None = None,
) -> RiskReport:
    """Average loss of ``kind`` over ``replicates`` Wishart draws.

    The closed form is attached when one exists in the evaluation frame; a Monte
    Carlo mean more than 4 standard errors away is flagged and logged.

    Raises:
        DomainError: If n < p or replicates is below the configured minimum
        MissingCalibrationError: If a rotation-equivariant kind has no calibration
    """
    from covrisk.services.config import get_config

    floor = min_replicates if min_replicates is not None else get_config().monte_carlo.min_replicates
    if replicates < floor:
        raise DomainError(f"Risk estimation needs at least {floor} replicates, got {replicates}")

    logger.info("Estimating risk", estimator=kind.value, loss=loss.value, p=p, n=n, replicates=replicates)
    samples, frame = loss_samples(
        kind,
        loss,
        p,
        n,
        replicates,
        rng,
        cal,
        sigma=sigma,
        coordinates=coordinates,
        workers=workers,
        shard_size=shard_size,
    )
    report = report_from_samples(kind, loss, p, n, samples, frame, rng.seed)
    if report.flagged:
        logger.warning(
            "Monte Carlo risk deviates from closed form",
            estimator=kind.value,
            loss=loss.value,
            mc_mean=report.mc_mean,
            analytic=report.analytic,
            deviation_se=report.deviation_se,
        )
    return report
