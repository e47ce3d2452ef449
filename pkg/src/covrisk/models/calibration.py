"""Persisted spectral calibration for the rotation-equivariant estimators."""

import math

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, Field, model_validator

from covrisk import __version__

CALIBRATION_FORMAT_VERSION = 1


class SpectralCalibration(BaseModel):
    """Monte Carlo estimates of E[log l_i] and E[l_i] for the sorted eigenvalues of W(I, n)."""

    format_version: int = CALIBRATION_FORMAT_VERSION
    tool_version: str = __version__
    p: int = Field(ge=1)
    n: int = Field(ge=1)
    replicates: int = Field(ge=1)
    seed: int = Field(ge=0)
    mean_log_eigs: list[float]
    mean_eigs: list[float]
    mean_log_eigs_se: list[float]
    mean_eigs_se: list[float]

    @model_validator(mode="after")
    def check_moments(self) -> "SpectralCalibration":
        """Lengths match p, log-means strictly decrease, and exp(E[log l]) <= E[l]."""
        if self.n < self.p:
            raise ValueError(f"Calibration needs n >= p, got n={self.n}, p={self.p}")
        for name in ("mean_log_eigs", "mean_eigs", "mean_log_eigs_se", "mean_eigs_se"):
            if len(getattr(self, name)) != self.p:
                raise ValueError(f"{name} must have length p={self.p}")
        if any(later >= earlier for earlier, later in zip(self.mean_log_eigs, self.mean_log_eigs[1:], strict=False)):
            raise ValueError("mean_log_eigs must be strictly decreasing")
        for i, (mean_log, mean) in enumerate(zip(self.mean_log_eigs, self.mean_eigs, strict=True)):
            if math.exp(mean_log) > mean * (1 + 1e-12):
                raise ValueError(f"Jensen violated at eigenvalue {i + 1}: exp({mean_log}) > {mean}")
        return self

    @property
    def geodesic_multipliers(self) -> npt.NDArray[np.float64]:
        """exp(-E[log l_i])."""
        return np.exp(-np.asarray(self.mean_log_eigs))

    @property
    def stein_multipliers(self) -> npt.NDArray[np.float64]:
        """1 / E[l_i]."""
        return 1 / np.asarray(self.mean_eigs)
