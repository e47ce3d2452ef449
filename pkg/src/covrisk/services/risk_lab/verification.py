"""Verification battery: risk ordering, coordinate invariance, gap identities and
local optimality of the geodesic multipliers."""

import math

import numpy as np

from covrisk.errors import DomainError
from covrisk.logger import get_logger
from covrisk.models.calibration import SpectralCalibration
from covrisk.models.risk import (
    SE_BAND,
    CheckResult,
    CheckStatus,
    Coordinates,
    EstimatorKind,
    LocalOptimalityReport,
    LossKind,
    PerturbedRisk,
    RiskReport,
    VerificationReport,
)
from covrisk.services.estimators import calibrate_spectrum, geodesic_multipliers, rescaled_factor_gram
from covrisk.services.losses import batch_loss
from covrisk.services.matrix_core.kernels import FloatArray
from covrisk.services.sampling import RngStream, run_sharded, sample_wishart_batch, stack_shard_size

from .analytic import analytic_geodesic_risk, analytic_stein_risk, geodesic_gap, minimum_geodesic_risk
from .monte_carlo import loss_samples, mc_risk, mean_and_se, report_from_samples

logger = get_logger(__name__)

# Child streams of the verification seed
EVALUATION_STREAM = 0
INDEPENDENT_STREAM = 1
CALIBRATION_STREAM = 2

STEIN_CHAIN = (EstimatorKind.IWASAWA_BEST, EstimatorKind.STEIN, EstimatorKind.MLE)
GEODESIC_CLOSED_FORM_KINDS = (
    EstimatorKind.MLE,
    EstimatorKind.STEIN,
    EstimatorKind.IWASAWA_BEST,
    EstimatorKind.GEODESIC_IWASAWA,
    EstimatorKind.GEODESIC_CHOLESKY,
)
DECAY_HORIZON = 200
GAP_TOLERANCE = 1e-12
# Acceptance band, in standard errors, for differences of two Monte Carlo means
DIFFERENCE_BAND = 2.0


def _check(name: str, status: CheckStatus, detail: str = "", **values: float | None) -> CheckResult:
    return CheckResult(name=name, status=status, detail=detail, values=values)


def _passes(ok: bool) -> CheckStatus:
    return "pass" if ok else "fail"


def stein_chain_check(p: int, n: int) -> CheckResult:
    """IwasawaBest < Stein < Mle for p >= 2; all equal at p = 1."""
    best, stein, mle = (analytic_stein_risk(kind, p, n) for kind in STEIN_CHAIN)
    if p == 1:
        ok = best == stein == mle
        detail = "equality at p = 1"
    else:
        ok = best < stein < mle
        detail = "strict ordering iwasawa_best < stein < mle"
    return _check("stein-ordering-analytic", _passes(ok), detail, iwasawa_best=best, stein=stein, mle=mle)


def decay_check(p: int, horizon: int = DECAY_HORIZON) -> CheckResult:
    """Analytic Stein risks strictly decrease in n on [p, horizon]."""
    failures = []
    for kind in STEIN_CHAIN:
        values = np.array([analytic_stein_risk(kind, p, n) for n in range(p, max(horizon, p + 1) + 1)])
        if not np.all(np.diff(values) < 0):
            failures.append(kind.value)
    detail = f"decreasing on n in [{p}, {horizon}]" if not failures else f"not decreasing: {', '.join(failures)}"
    return _check("stein-asymptotic-decay", _passes(not failures), detail)


def coordinate_invariance_check(p: int, n: int) -> CheckResult:
    iwasawa = analytic_geodesic_risk(EstimatorKind.GEODESIC_IWASAWA, p, n)
    cholesky = analytic_geodesic_risk(EstimatorKind.GEODESIC_CHOLESKY, p, n)
    return _check(
        "geodesic-coordinate-invariance-analytic",
        _passes(iwasawa == cholesky),
        "geodesic_iwasawa and geodesic_cholesky minimum risks",
        geodesic_iwasawa=iwasawa,
        geodesic_cholesky=cholesky,
    )


def gap_identity_checks(p: int, n: int) -> list[CheckResult]:
    """Risk differences against the geodesic optimum equal the squared log-bias sums."""
    optimum = minimum_geodesic_risk(p, n)
    checks = []
    for kind, name in ((EstimatorKind.IWASAWA_BEST, "iwasawa"), (EstimatorKind.STEIN, "cholesky")):
        difference = analytic_geodesic_risk(kind, p, n) - optimum
        gap = geodesic_gap(kind, p, n)
        ok = math.isclose(difference, gap, rel_tol=GAP_TOLERANCE, abs_tol=GAP_TOLERANCE * optimum)
        checks.append(_check(f"gap-identity-{name}", _passes(ok), kind.value, difference=difference, gap=gap))
    return checks


def agreement_check(report: RiskReport) -> CheckResult:
    """Monte Carlo mean within SE_BAND standard errors of the closed form."""
    return _check(
        f"mc-agreement:{report.loss.value}:{report.estimator.value}",
        _passes(not report.flagged),
        f"{report.formula} in {report.coordinates.value} coordinates",
        mc_mean=report.mc_mean,
        mc_se=report.mc_se,
        analytic=report.analytic,
    )


def _combined_se(*reports: RiskReport) -> float:
    return math.sqrt(sum(r.mc_se**2 for r in reports))


def verify_ordering(
    p: int,
    n: int,
    replicates: int,
    rng: RngStream,
    *,
    cal: SpectralCalibration | None = None,
    calibration_replicates: int | None = None,
    workers: int | None = None,
    shard_size: int | None = None,
) -> VerificationReport:
    """Evaluate the Stein-risk ordering and the geodesic identities at (p, n).

    Analytic checks always run. Monte Carlo checks are ``inconclusive`` when
    ``replicates`` (or the calibration replicates) are below the configured minimum.

    Raises:
        DomainError: If n < p or p < 1
    """
    from covrisk.services.config import get_config

    if p < 1 or n < p:
        raise DomainError(f"Need n >= p >= 1, got p={p}, n={n}")
    mc_config = get_config().monte_carlo
    report = VerificationReport(p=p, n=n, replicates=replicates, seed=rng.seed)
    checks = report.checks
    checks.append(stein_chain_check(p, n))
    checks.append(decay_check(p))
    checks.append(coordinate_invariance_check(p, n))
    checks.extend(gap_identity_checks(p, n))

    if replicates < mc_config.min_replicates:
        checks.append(
            _check(
                "monte-carlo",
                "inconclusive",
                f"{replicates} replicates is below the minimum of {mc_config.min_replicates}",
            )
        )
        return report

    logger.info("Verifying risk identities", p=p, n=n, replicates=replicates, seed=rng.seed)
    evaluation = rng.child(EVALUATION_STREAM)

    def risk(
        kind: EstimatorKind,
        loss: LossKind,
        stream: RngStream = evaluation,
        coordinates: Coordinates | None = None,
    ) -> RiskReport:
        return mc_risk(
            kind,
            loss,
            p,
            n,
            replicates,
            stream,
            coordinates=coordinates,
            workers=workers,
            shard_size=shard_size,
        )

    report.stein_table = [risk(kind, LossKind.STEIN) for kind in STEIN_CHAIN]
    report.geodesic_table = [risk(kind, LossKind.GEODESIC) for kind in GEODESIC_CLOSED_FORM_KINDS]
    checks.extend(agreement_check(row) for row in report.stein_table + report.geodesic_table)

    # The two geodesic-optimal estimators give identical losses on shared samples
    by_kind = {row.estimator: row for row in report.geodesic_table}
    iwasawa = by_kind[EstimatorKind.GEODESIC_IWASAWA]
    cholesky = risk(EstimatorKind.GEODESIC_CHOLESKY, LossKind.GEODESIC, rng.child(INDEPENDENT_STREAM))
    combined = _combined_se(iwasawa, cholesky)
    checks.append(
        _check(
            "geodesic-coordinate-invariance-mc",
            _passes(abs(iwasawa.mc_mean - cholesky.mc_mean) <= SE_BAND * combined),
            "independent streams",
            geodesic_iwasawa=iwasawa.mc_mean,
            geodesic_cholesky=cholesky.mc_mean,
            combined_se=combined,
        )
    )

    for kind in (EstimatorKind.MLE, EstimatorKind.STEIN, EstimatorKind.GEODESIC_CHOLESKY):
        full = risk(kind, LossKind.GEODESIC, coordinates=Coordinates.FULL)
        checks.append(
            _check(
                f"geodesic-full-coordinates:{kind.value}",
                "info",
                "eigenvalue geodesic risk, no closed form",
                mc_mean=full.mc_mean,
                mc_se=full.mc_se,
            )
        )

    if cal is None:
        try:
            cal = calibrate_spectrum(
                p,
                n,
                calibration_replicates or mc_config.calibration_replicates,
                rng.child(CALIBRATION_STREAM),
                workers=workers,
                shard_size=shard_size,
            )
        except DomainError as e:
            checks.append(_check("rot-eq-inadmissibility", "inconclusive", str(e)))
            logger.info("Verification finished", p=p, n=n, passed=report.passed)
            return report
    checks.extend(rotation_equivariant_checks(report, cal, evaluation, workers=workers, shard_size=shard_size))
    logger.info("Verification finished", p=p, n=n, passed=report.passed)
    return report


def rotation_equivariant_checks(
    report: VerificationReport,
    cal: SpectralCalibration,
    rng: RngStream,
    *,
    workers: int | None = None,
    shard_size: int | None = None,
) -> list[CheckResult]:
    """Geodesic risks of the rotation-equivariant pair on common samples.

    The expected difference is sum_i (log E[l_i] - E[log l_i])^2. Its sign is
    judged by the paired standard error; the combined one is reported alongside.
    """
    p, n, replicates = report.p, report.n, report.replicates
    losses = {}
    for kind in (EstimatorKind.ROT_EQ_STEIN, EstimatorKind.ROT_EQ_GEODESIC):
        samples, frame = loss_samples(
            kind, LossKind.GEODESIC, p, n, replicates, rng, cal, workers=workers, shard_size=shard_size
        )
        losses[kind] = samples
        report.geodesic_table.append(report_from_samples(kind, LossKind.GEODESIC, p, n, samples, frame, rng.seed))
    stein_row, geodesic_row = report.geodesic_table[-2:]

    log_gap = np.log(np.asarray(cal.mean_eigs)) - np.asarray(cal.mean_log_eigs)
    predicted = float(np.sum(log_gap**2))
    difference = stein_row.mc_mean - geodesic_row.mc_mean
    combined = _combined_se(stein_row, geodesic_row)
    _, paired = mean_and_se(losses[EstimatorKind.ROT_EQ_STEIN] - losses[EstimatorKind.ROT_EQ_GEODESIC])
    ok = difference > DIFFERENCE_BAND * paired and abs(difference - predicted) <= SE_BAND * combined
    return [
        _check(
            "rot-eq-inadmissibility",
            _passes(ok),
            "rot_eq_geodesic below rot_eq_stein under geodesic loss",
            difference=difference,
            predicted=predicted,
            combined_se=combined,
            paired_se=paired,
        ),
        _check(
            "mean-vs-geometric-multipliers",
            "info",
            "max over i of log E[l_i] - E[log l_i]",
            max_log_gap=float(np.max(log_gap)),
        ),
    ]


def _perturbed_multipliers(p: int, n: int, perturbation: float) -> list[tuple[int, int, FloatArray]]:
    """(coordinate, sign, multipliers) for the optimum (coordinate -1) and each single-coordinate shift."""
    optimum = geodesic_multipliers(p, n)
    variants: list[tuple[int, int, FloatArray]] = [(-1, 0, optimum)]
    for i in range(p):
        for sign in (1, -1):
            shifted = optimum.copy()
            shifted[i] *= math.exp(sign * perturbation)
            variants.append((i, sign, shifted))
    return variants


def local_optimality_check(
    p: int,
    n: int,
    replicates: int,
    rng: RngStream,
    perturbation: float,
    *,
    workers: int | None = None,
    shard_size: int | None = None,
    min_replicates: int | None = None,
) -> LocalOptimalityReport:
    """Geodesic risk of the Cholesky-coordinate estimator at the optimal multipliers
    d_i = exp(-E[log chi2_{n-i+1}]) and at every d_i * exp(+-perturbation).

    All variants are evaluated on the same samples, so each excess is judged by
    the standard error of the per-sample loss difference (paired_se). The
    expected excess is perturbation^2; the measured excess must lie within
    SE_BAND paired standard errors of it, and must clear DIFFERENCE_BAND paired
    standard errors whenever the prediction itself clears SE_BAND of them.

    Raises:
        DomainError: If perturbation is outside [0, 0.5), n < p, or replicates is below the minimum
    """
    from covrisk.services.config import get_config

    if not 0 <= perturbation < 0.5:
        raise DomainError(f"perturbation must lie in [0, 0.5), got {perturbation}")
    if p < 1 or n < p:
        raise DomainError(f"Need n >= p >= 1, got p={p}, n={n}")
    floor = min_replicates if min_replicates is not None else get_config().monte_carlo.min_replicates
    if replicates < floor:
        raise DomainError(f"Local optimality check needs at least {floor} replicates, got {replicates}")

    variants = _perturbed_multipliers(p, n, perturbation)

    def shard(stream: RngStream, size: int) -> FloatArray:
        batch = sample_wishart_batch(stream, None, n, size, p=p)
        columns = [
            batch_loss(LossKind.GEODESIC, rescaled_factor_gram(batch.factors, m), None, Coordinates.STARRED)
            for _, _, m in variants
        ]
        return np.column_stack(columns)

    logger.info("Checking local optimality", p=p, n=n, replicates=replicates, perturbation=perturbation)
    losses = np.concatenate(
        run_sharded(rng, replicates, shard, workers=workers, shard_size=stack_shard_size(p, shard_size))
    )
    optimum_risk, optimum_se = mean_and_se(losses[:, 0])
    expected = perturbation**2

    report = LocalOptimalityReport(
        p=p,
        n=n,
        replicates=replicates,
        seed=rng.seed,
        perturbation=perturbation,
        optimum_risk=optimum_risk,
        optimum_se=optimum_se,
    )
    for column, (coordinate, sign, _) in enumerate(variants[1:], start=1):
        risk, se = mean_and_se(losses[:, column])
        _, paired = mean_and_se(losses[:, column] - losses[:, 0])
        excess = risk - optimum_risk
        combined = math.hypot(optimum_se, se)
        row = PerturbedRisk(
            coordinate=coordinate,
            sign=1 if sign > 0 else -1,
            risk=risk,
            se=se,
            excess=excess,
            expected_excess=expected,
            combined_se=combined,
            paired_se=paired,
        )
        report.perturbed.append(row)
        if perturbation == 0:
            ok = excess == 0
        else:
            resolved = expected > SE_BAND * paired
            agrees = abs(excess - expected) <= SE_BAND * paired
            ok = agrees and (not resolved or excess > DIFFERENCE_BAND * paired)
        report.checks.append(
            _check(
                f"local-optimality:d{coordinate + 1}{'+' if sign > 0 else '-'}",
                _passes(ok),
                f"excess risk for multiplier {coordinate + 1} scaled by exp({sign * perturbation:+g})",
                excess=excess,
                expected=expected,
                combined_se=combined,
                paired_se=paired,
            )
        )

    for coordinate in range(p):
        up, down = (row for row in report.perturbed if row.coordinate == coordinate)
        # up.excess - down.excess has standard error close to up.paired_se + down.paired_se
        band = SE_BAND * (up.paired_se + down.paired_se)
        report.checks.append(
            _check(
                f"sign-symmetry:d{coordinate + 1}",
                _passes(abs(up.excess - down.excess) <= band),
                "+perturbation and -perturbation give equal excess",
                plus=up.excess,
                minus=down.excess,
            )
        )

    logger.info("Local optimality finished", p=p, n=n, passed=report.passed)
    return report
