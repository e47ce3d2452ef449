"""Command handlers. Each returns a process exit code; output goes to stdout or the
configured file, logs go to stderr."""

import sys
from pathlib import Path
from typing import Any

import numpy as np

from covrisk.errors import DomainError
from covrisk.logger import get_logger
from covrisk.models.calibration import SpectralCalibration
from covrisk.models.risk import CheckResult
from covrisk.models.run_config import OutputFormat, RunConfig
from covrisk.services.config import get_config
from covrisk.services.eigen_stats import det_product_check, empirical_spectral_report
from covrisk.services.estimators import calibrate_spectrum, load_calibration, save_calibration
from covrisk.services.matrix_core import SpdMatrix, cholesky, eigh, iwasawa_full, log_determinant
from covrisk.services.risk_lab import local_optimality_check, mc_risk, verify_ordering
from covrisk.services.sampling import RngStream, sample_wishart_batch

from .matrix_io import format_matrix, format_number, read_matrix
from .render import render_checks, render_mapping, render_risk_rows, to_json

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# Stream ids under the run seed; calibration draws never overlap evaluation draws
EVALUATION_STREAM = 0
CALIBRATION_STREAM = 1
DET_PRODUCT_STREAM = 2
# Child of the verification stream not used by verify_ordering
LOCAL_OPTIMALITY_CHILD = 3


def emit(text: str, output_path: Path | None) -> None:
    """Write command output to ``output_path`` or stdout."""
    if output_path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(text, encoding="utf-8")
    logger.info("Wrote output", path=str(output_path))


def _context(cfg: RunConfig, **extra: object) -> dict[str, Any]:
    return {"command": cfg.command.value, "p": cfg.p, "n": cfg.n, "seed": cfg.seed, **extra}


def _dims(cfg: RunConfig) -> tuple[int, int]:
    assert cfg.p is not None and cfg.n is not None
    return cfg.p, cfg.n


def resolve_calibration(cfg: RunConfig) -> SpectralCalibration:
    """Load ``cfg.calibration_path`` when it exists, otherwise compute and (if a path is given) save it."""
    p, n = _dims(cfg)
    path = cfg.calibration_path
    if path is not None and path.exists():
        logger.info("Reusing calibration file, not recomputing", path=str(path))
        return load_calibration(path, p, n)

    calibration = calibrate_spectrum(
        p, n, cfg.calibration_replicates, RngStream(cfg.seed, CALIBRATION_STREAM), workers=cfg.workers
    )
    if path is not None:
        save_calibration(calibration, path)
    return calibration


def cmd_risk_table(cfg: RunConfig) -> int:
    """Monte Carlo risk (and closed form, where one exists) for every selected estimator and loss.

    Every row is evaluated on the same samples. Exit 1 when a row deviates from its
    closed form by more than 4 standard errors.
    """
    p, n = _dims(cfg)
    calibration = resolve_calibration(cfg) if any(k.needs_calibration for k in cfg.estimators) else None
    evaluation = RngStream(cfg.seed, EVALUATION_STREAM)

    rows = [
        mc_risk(kind, loss, p, n, cfg.replicates, evaluation, calibration, workers=cfg.workers)
        for kind in cfg.estimators
        for loss in cfg.losses
    ]
    emit(render_risk_rows(rows, cfg.output_format, _context(cfg, replicates=cfg.replicates)), cfg.output_path)

    flagged = [f"{row.estimator.value}/{row.loss.value}" for row in rows if row.flagged]
    if flagged:
        logger.warning("Rows outside the 4-SE band", rows=flagged)
        return EXIT_FAILURE
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    """Run the verification battery and the local optimality check; exit 0 iff every check passes."""
    p, n = _dims(cfg)
    rng = RngStream(cfg.seed, EVALUATION_STREAM)
    calibration = None
    if cfg.calibration_path is not None and cfg.calibration_path.exists():
        calibration = load_calibration(cfg.calibration_path, p, n)

    report = verify_ordering(
        p,
        n,
        cfg.replicates,
        rng,
        cal=calibration,
        calibration_replicates=cfg.calibration_replicates,
        workers=cfg.workers,
    )
    checks: list[CheckResult] = list(report.checks)
    try:
        optimality = local_optimality_check(
            p, n, cfg.replicates, rng.child(LOCAL_OPTIMALITY_CHILD), cfg.perturbation, workers=cfg.workers
        )
        checks.extend(optimality.checks)
    except DomainError as e:
        checks.append(CheckResult(name="local-optimality", status="inconclusive", detail=str(e)))

    passed = all(check.status in ("pass", "info") for check in checks)
    context = _context(cfg, replicates=cfg.replicates, passed=passed)
    emit(render_checks(checks, cfg.output_format, context), cfg.output_path)
    if not passed:
        failing = [check.name for check in checks if check.status in ("fail", "inconclusive")]
        logger.warning("Verification failed", checks=failing)
        return EXIT_FAILURE
    return EXIT_OK


def cmd_decompose(cfg: RunConfig) -> int:
    """Cholesky factor, Iwasawa pivots and eigenvalues of the matrix in ``cfg.matrix_path``."""
    assert cfg.matrix_path is not None
    matrix = SpdMatrix(read_matrix(cfg.matrix_path))
    factor = cholesky(matrix).entries
    pivots = iwasawa_full(matrix).pivots
    eigenvalues = eigh(matrix).eigenvalues

    if cfg.output_format is OutputFormat.JSON:
        text = to_json(
            {
                "p": matrix.p,
                "cholesky_factor": factor.tolist(),
                "iwasawa_pivots": pivots.tolist(),
                "eigenvalues": eigenvalues.tolist(),
                "log_determinant": log_determinant(matrix),
            }
        )
    elif cfg.output_format is OutputFormat.CSV:
        text = render_mapping(
            {
                "iwasawa_pivots": " ".join(format_number(v) for v in pivots),
                "eigenvalues": " ".join(format_number(v) for v in eigenvalues),
                "log_determinant": log_determinant(matrix),
            },
            cfg.output_format,
        )
    else:
        text = (
            "cholesky factor:\n"
            + format_matrix(factor)
            + "iwasawa pivots: "
            + " ".join(format_number(v) for v in pivots)
            + "\neigenvalues: "
            + " ".join(format_number(v) for v in eigenvalues)
            + f"\nlog determinant: {format_number(log_determinant(matrix))}\n"
        )
    emit(text, cfg.output_path)
    return EXIT_OK


def cmd_sample(cfg: RunConfig) -> int:
    """``cfg.count`` Wishart draws W(sigma, n), sigma from ``cfg.sigma_path`` or the identity."""
    p, n = _dims(cfg)
    sigma = SpdMatrix(read_matrix(cfg.sigma_path)) if cfg.sigma_path is not None else None
    if sigma is not None and sigma.p != p:
        raise DomainError(f"sigma file has dimension {sigma.p}, expected p={p}")
    batch = sample_wishart_batch(RngStream(cfg.seed, EVALUATION_STREAM), sigma, n, cfg.count, p=p)

    if cfg.output_format is OutputFormat.JSON:
        draws = [
            {"scatter": batch.scatters[k].tolist(), "bartlett_factor": batch.factors[k].tolist()}
            for k in range(len(batch))
        ]
        text = to_json(_context(cfg, draws=draws))
    elif cfg.output_format is OutputFormat.CSV:
        lines = ["draw,row,col,scatter,bartlett_factor"]
        for k in range(len(batch)):
            for i, j in np.ndindex(p, p):
                scatter, factor = batch.scatters[k, i, j], batch.factors[k, i, j]
                lines.append(f"{k},{i},{j},{format_number(scatter)},{format_number(factor)}")
        text = "\n".join(lines) + "\n"
    else:
        text = "".join(f"# draw {k + 1}\n" + format_matrix(batch.scatters[k]) for k in range(len(batch)))
    emit(text, cfg.output_path)
    return EXIT_OK


def cmd_calibrate(cfg: RunConfig) -> int:
    """Compute a spectral calibration and write it to ``cfg.output_path`` or the default calibration path."""
    p, n = _dims(cfg)
    path = cfg.output_path or get_config().paths.get_calibration_path(p, n, cfg.seed)
    calibration = calibrate_spectrum(
        p, n, cfg.calibration_replicates, RngStream(cfg.seed, CALIBRATION_STREAM), workers=cfg.workers
    )
    save_calibration(calibration, path)
    sys.stdout.write(f"{path}\n")
    return EXIT_OK


def cmd_spectra(cfg: RunConfig) -> int:
    """Empirical spectral report and the determinant-product check; exit 1 if the latter fails."""
    p, n = _dims(cfg)
    spectral = empirical_spectral_report(
        p, n, cfg.replicates, RngStream(cfg.seed, EVALUATION_STREAM), workers=cfg.workers
    )
    det = det_product_check(p, n, cfg.replicates, RngStream(cfg.seed, DET_PRODUCT_STREAM), workers=cfg.workers)

    values: dict[str, Any] = spectral.model_dump(mode="json")
    values.update({"det_product_mean": det.mean, "det_product_se": det.se, "det_product_passed": det.passed})
    for warning in spectral.warnings:
        logger.warning(warning, p=p, n=n)
    values.pop("warnings")
    emit(render_mapping(values, cfg.output_format), cfg.output_path)
    return EXIT_OK if det.passed else EXIT_FAILURE
