"""Data models for covrisk."""

from covrisk.models.app_config import AppConfig
from covrisk.models.calibration import SpectralCalibration
from covrisk.models.distributions import ChiSquareLogMoments
from covrisk.models.risk import (
    CheckResult,
    Coordinates,
    EstimatorKind,
    LocalOptimalityReport,
    LossKind,
    PerturbedRisk,
    RiskReport,
    VerificationReport,
)
from covrisk.models.run_config import Command, OutputFormat, RunConfig
from covrisk.models.spectra import DetProductReport, SpectralReport, SpectrumSample

__all__ = [
    "AppConfig",
    "ChiSquareLogMoments",
    "CheckResult",
    "Command",
    "Coordinates",
    "DetProductReport",
    "EstimatorKind",
    "LocalOptimalityReport",
    "LossKind",
    "OutputFormat",
    "PerturbedRisk",
    "RiskReport",
    "RunConfig",
    "SpectralCalibration",
    "SpectralReport",
    "SpectrumSample",
    "VerificationReport",
]
