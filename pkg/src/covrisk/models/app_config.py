"""Configuration data models for covrisk."""

from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, field_validator


class MonteCarloConfig(BaseModel):
    """Monte Carlo defaults shared by every simulation command."""

    seed: int = Field(default=20240601, ge=0, lt=2**64)
    replicates: int = Field(default=100_000, ge=1)
    calibration_replicates: int = Field(default=200_000, ge=1)
    # Below these counts the 4-SE bands are too wide to decide anything
    min_replicates: int = Field(default=1_000, ge=1)
    min_calibration_replicates: int = Field(default=10_000, ge=1)
    shard_size: int = Field(default=10_000, ge=1)
    workers: int | None = Field(default=None, ge=1)  # None means available parallelism


class PathsConfig(BaseModel):
    """Paths configuration."""

    data_dir: Path = Field(default_factory=lambda: Path.home() / ".covrisk")
    calibrations_dir: Path | None = None
    logs_dir: Path | None = None

    @field_validator("data_dir", mode="before")
    @classmethod
    def expand_data_dir(cls, v: str | Path) -> Path:
        """Expand user path for data_dir."""
        if isinstance(v, str):
            return Path(v).expanduser()
        return v

    @field_validator("calibrations_dir", "logs_dir", mode="before")
    @classmethod
    def expand_optional_path(cls, v: str | Path | None) -> Path | None:
        """Expand user path for optional paths."""
        if v is None:
            return None
        if isinstance(v, str):
            return Path(v).expanduser()
        return v

    def model_post_init(self, __context: object) -> None:
        """Set default subdirectories if not specified."""
        if self.calibrations_dir is None:
            self.calibrations_dir = self.data_dir / "calibrations"
        if self.logs_dir is None:
            self.logs_dir = self.data_dir / "logs"

    def get_calibration_path(self, p: int, n: int, seed: int) -> Path:
        """
        Get the default location of a persisted spectral calibration.

        Args:
            p: Dimension
            n: Degrees of freedom
            seed: Seed the calibration was drawn with

        Returns:
            Path such as ~/.covrisk/calibrations/calibration_p3_n10_seed7.json
        """
        assert self.calibrations_dir is not None
        return self.calibrations_dir / f"calibration_p{p}_n{n}_seed{seed}.json"


class AdvancedConfig(BaseModel):
    """Advanced configuration."""

    log_level: Literal["WARNING", "INFO", "DEBUG"] = "INFO"
    log_to_file: bool = False
    log_max_size_mb: int = 10  # Maximum log file size in MB before rotation
    log_backup_count: int = 5  # Number of backup log files to keep


class AppConfig(BaseModel):
    """Application configuration."""

    monte_carlo: MonteCarloConfig = Field(default_factory=MonteCarloConfig)
    paths: PathsConfig = Field(default_factory=PathsConfig)
    advanced: AdvancedConfig = Field(default_factory=AdvancedConfig)
