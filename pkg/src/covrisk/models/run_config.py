"""Validated settings of one command-line run."""

from enum import Enum
from pathlib import Path

from pydantic import BaseModel, Field, model_validator

from covrisk.models.risk import EstimatorKind, LossKind


class Command(str, Enum):
    RISK_TABLE = "risk-table"
    VERIFY = "verify"
    DECOMPOSE = "decompose"
    SAMPLE = "sample"
    CALIBRATE = "calibrate"
    SPECTRA = "spectra"


class OutputFormat(str, Enum):
    TABLE = "table"
    CSV = "csv"
    JSON = "json"


class RunConfig(BaseModel):
    """Command-line flags merged over the application config."""

    command: Command
    p: int | None = Field(default=None, ge=1)
    n: int | None = Field(default=None, ge=1)
    replicates: int = Field(default=100_000, ge=1)
    calibration_replicates: int = Field(default=200_000, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    loss: LossKind | None = None  # None means both losses
    estimators: list[EstimatorKind] = Field(default_factory=lambda: list(EstimatorKind), min_length=1)
    output_format: OutputFormat = OutputFormat.TABLE
    output_path: Path | None = None
    calibration_path: Path | None = None
    workers: int | None = Field(default=None, ge=1)
    matrix_path: Path | None = None
    sigma_path: Path | None = None
    perturbation: float = Field(default=0.2, ge=0, lt=0.5)
    count: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def check_dimensions(self) -> "RunConfig":
        """Every command except decompose needs n >= p >= 1; decompose needs a matrix file."""
        if self.command is Command.DECOMPOSE:
            if self.matrix_path is None:
                raise ValueError("decompose needs a matrix file")
            return self
        if self.p is None or self.n is None:
            raise ValueError(f"{self.command.value} needs both p and n")
        if self.n < self.p:
            raise ValueError(f"n must be at least p, got p={self.p}, n={self.n}")
        if self.command is Command.SPECTRA and self.p < 2:
            raise ValueError("spectra needs p >= 2")
        return self

    @property
    def losses(self) -> list[LossKind]:
        return [self.loss] if self.loss is not None else list(LossKind)
