import argparse
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

from pydantic import ValidationError

from covrisk import __version__
from covrisk.errors import (
    CalibrationMismatchError,
    CovRiskError,
    DomainError,
    MatrixFormatError,
    MissingCalibrationError,
)
from covrisk.logger import configure_logging, get_logger
from covrisk.models.risk import EstimatorKind, LossKind
from covrisk.models.run_config import Command, OutputFormat, RunConfig
from covrisk.services.config import get_config, reload_config

logger = get_logger(__name__)

# Replicates of the spectral report when --replicates is not given; each draw needs a full eigendecomposition
SPECTRA_DEFAULT_REPLICATES = 200

USAGE_ERRORS = (MatrixFormatError, CalibrationMismatchError, MissingCalibrationError, DomainError)


def _add_run_arguments(parser: argparse.ArgumentParser, *, replicates: bool = True) -> None:
    parser.add_argument("--p", type=int, required=True, help="Dimension")
    parser.add_argument("--n", type=int, required=True, help="Degrees of freedom (sample size)")
    if replicates:
        parser.add_argument("--replicates", type=int, help="Monte Carlo replicates (default from config)")
    parser.add_argument("--seed", type=int, help="Seed (default from config or COVRISK_SEED)")


def _add_output_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format", dest="output_format", choices=[f.value for f in OutputFormat], default=OutputFormat.TABLE.value
    )
    parser.add_argument("--output", dest="output_path", type=Path, help="Write output to a file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covrisk",
        description="covrisk - covariance estimators, their risks under Stein and geodesic loss",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  covrisk risk-table --p 3 --n 10 --replicates 100000 --seed 7 --format csv
  covrisk verify --p 3 --n 10 --json
  covrisk decompose matrix.txt
  covrisk calibrate --p 3 --n 10
        """,
    )
    parser.add_argument("--config", type=Path, metavar="PATH", help="Configuration file (YAML)")
    parser.add_argument("--workers", type=int, metavar="N", help="Worker threads (default: available parallelism)")
    parser.add_argument("--log-level", choices=["WARNING", "INFO", "DEBUG"], help="Log level (logs go to stderr)")
    parser.add_argument("--version", action="version", version=f"covrisk {__version__}")

    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    risk = sub.add_parser(Command.RISK_TABLE.value, help="Risk of every estimator under both losses")
    _add_run_arguments(risk)
    risk.add_argument("--loss", choices=[k.value for k in LossKind], help="Only this loss")
    risk.add_argument(
        "--estimators",
        nargs="+",
        choices=[k.value for k in EstimatorKind],
        help="Subset of estimators (default: all seven)",
    )
    risk.add_argument("--calibration", dest="calibration_path", type=Path, help="Calibration file to reuse or create")
    risk.add_argument("--calibration-replicates", type=int, help="Replicates when a calibration must be computed")
    _add_output_arguments(risk)

    verify = sub.add_parser(Command.VERIFY.value, help="Risk ordering, coordinate invariance and gap identities")
    _add_run_arguments(verify)
    verify.add_argument("--perturbation", type=float, default=0.2, help="Log-scale multiplier perturbation")
    verify.add_argument("--calibration", dest="calibration_path", type=Path, help="Existing calibration file")
    verify.add_argument("--calibration-replicates", type=int, help="Replicates when a calibration must be computed")
    verify.add_argument("--json", action="store_true", help="Machine-readable verdicts")
    verify.add_argument("--output", dest="output_path", type=Path, help="Write output to a file instead of stdout")

    decompose = sub.add_parser(Command.DECOMPOSE.value, help="Cholesky factor, Iwasawa pivots and eigenvalues")
    decompose.add_argument("matrix_path", type=Path, help="Matrix file: p, then p rows of p numbers")
    _add_output_arguments(decompose)

    sample = sub.add_parser(Command.SAMPLE.value, help="Draw Wishart matrices")
    _add_run_arguments(sample, replicates=False)
    sample.add_argument("--count", type=int, default=1, help="Number of draws")
    sample.add_argument("--sigma", dest="sigma_path", type=Path, help="Scale matrix file (default: identity)")
    _add_output_arguments(sample)

    calibrate = sub.add_parser(Command.CALIBRATE.value, help="Estimate E[l_i] and E[log l_i] and save them")
    _add_run_arguments(calibrate)
    calibrate.add_argument("--output", dest="output_path", type=Path, help="Calibration file (default in data dir)")

    spectra = sub.add_parser(Command.SPECTRA.value, help="Empirical log-eigenvalue statistics")
    _add_run_arguments(spectra)
    _add_output_arguments(spectra)

    return parser


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge parsed flags over the application config.

    Raises:
        ValidationError: If the merged settings are invalid
    """
    mc = get_config().monte_carlo
    command = Command(args.command)
    values: dict[str, object] = {
        "command": command,
        "seed": args.seed if getattr(args, "seed", None) is not None else mc.seed,
        "workers": args.workers or mc.workers,
        "calibration_replicates": mc.calibration_replicates,
        "replicates": mc.replicates,
    }
    for name in ("p", "n", "loss", "output_path", "calibration_path", "matrix_path", "sigma_path", "count"):
        if getattr(args, name, None) is not None:
            values[name] = getattr(args, name)
    if getattr(args, "estimators", None):
        values["estimators"] = args.estimators
    if getattr(args, "perturbation", None) is not None:
        values["perturbation"] = args.perturbation

    replicates = getattr(args, "replicates", None)
    if command is Command.CALIBRATE:
        values["calibration_replicates"] = replicates or mc.calibration_replicates
    elif replicates is not None:
        values["replicates"] = replicates
    elif command is Command.SPECTRA:
        values["replicates"] = SPECTRA_DEFAULT_REPLICATES
    if getattr(args, "calibration_replicates", None) is not None:
        values["calibration_replicates"] = args.calibration_replicates

    if getattr(args, "json", False):
        values["output_format"] = OutputFormat.JSON
    elif getattr(args, "output_format", None):
        values["output_format"] = args.output_format
    return RunConfig.model_validate(values)


def _handlers() -> dict[Command, Callable[[RunConfig], int]]:
    from covrisk.cli import (
        cmd_calibrate,
        cmd_decompose,
        cmd_risk_table,
        cmd_sample,
        cmd_spectra,
        cmd_verify,
    )

    return {
        Command.RISK_TABLE: cmd_risk_table,
        Command.VERIFY: cmd_verify,
        Command.DECOMPOSE: cmd_decompose,
        Command.SAMPLE: cmd_sample,
        Command.CALIBRATE: cmd_calibrate,
        Command.SPECTRA: cmd_spectra,
    }


def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run the command and return its exit code.

    0 success, 1 failed check or non-SPD input, 2 usage error.
    """
    from covrisk.cli import EXIT_FAILURE, EXIT_USAGE

    parser = build_parser()
    args = parser.parse_args(argv)

    if args.config is not None:
        reload_config(args.config)
    configure_logging(args.log_level)

    try:
        cfg = build_run_config(args)
    except ValidationError as e:
        parser.print_usage(sys.stderr)
        print(f"covrisk: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        return _handlers()[cfg.command](cfg)
    except USAGE_ERRORS as e:
        print(f"covrisk: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CovRiskError as e:
        logger.error("Command failed", command=cfg.command.value, error=str(e))
        print(f"covrisk: {e}", file=sys.stderr)
        return EXIT_FAILURE


def main() -> None:
    """Main entry point with CLI argument parsing."""
    sys.exit(run())


if __name__ == "__main__":
    main()
