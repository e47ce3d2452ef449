"""Risk, verification and estimator-kind models."""

import math
from enum import Enum
from typing import Literal

from pydantic import BaseModel, Field, computed_field

# Agreement band used throughout: |mc - analytic| <= SE_BAND * se
SE_BAND = 4.0


class EstimatorKind(str, Enum):
    """The seven covariance estimators."""

    MLE = "mle"
    STEIN = "stein"
    IWASAWA_BEST = "iwasawa_best"
    GEODESIC_IWASAWA = "geodesic_iwasawa"
    GEODESIC_CHOLESKY = "geodesic_cholesky"
    ROT_EQ_STEIN = "rot_eq_stein"
    ROT_EQ_GEODESIC = "rot_eq_geodesic"

    @property
    def is_diagonal(self) -> bool:
        """Estimates the diagonal representative sigma* rather than sigma."""
        return self in (EstimatorKind.IWASAWA_BEST, EstimatorKind.GEODESIC_IWASAWA)

    @property
    def needs_calibration(self) -> bool:
        return self in (EstimatorKind.ROT_EQ_STEIN, EstimatorKind.ROT_EQ_GEODESIC)


class LossKind(str, Enum):
    STEIN = "stein"
    GEODESIC = "geodesic"


class Coordinates(str, Enum):
    """Frame a loss is evaluated in.

    FULL compares the p x p matrices; STARRED compares their Iwasawa pivot vectors.
    """

    FULL = "full"
    STARRED = "starred"


CheckStatus = Literal["pass", "fail", "inconclusive", "info"]


class RiskReport(BaseModel):
    """Monte Carlo risk of one estimator under one loss, with the closed form when one applies."""

    estimator: EstimatorKind
    loss: LossKind
    p: int = Field(ge=1)
    n: int = Field(ge=1)
    analytic: float | None = None
    formula: str | None = None  # tag of the closed form, e.g. "cholesky-geodesic"
    reference: str | None = None  # source the closed form is traced to, e.g. "eq6"
    mc_mean: float
    mc_se: float = Field(ge=0)
    replicates: int = Field(ge=1)
    seed: int = Field(ge=0)
    coordinates: Coordinates

    @computed_field  # type: ignore[prop-decorator]
    @property
    def deviation_se(self) -> float | None:
        """(mc_mean - analytic) / mc_se, or None without a closed form."""
        if self.analytic is None:
            return None
        if self.mc_se == 0:
            return 0.0 if self.mc_mean == self.analytic else math.inf
        return (self.mc_mean - self.analytic) / self.mc_se

    @computed_field  # type: ignore[prop-decorator]
    @property
    def flagged(self) -> bool:
        """True when the Monte Carlo mean is more than SE_BAND standard errors from the closed form."""
        deviation = self.deviation_se
        return deviation is not None and abs(deviation) > SE_BAND


class CheckResult(BaseModel):
    """One verdict of the verification battery."""

    name: str
    status: CheckStatus
    detail: str = ""
    values: dict[str, float | None] = Field(default_factory=dict)


class VerificationReport(BaseModel):
    """Risk ordering, coordinate invariance and gap identities at one (p, n)."""

    p: int
    n: int
    replicates: int
    seed: int
    checks: list[CheckResult] = Field(default_factory=list)
    stein_table: list[RiskReport] = Field(default_factory=list)
    geodesic_table: list[RiskReport] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.status in ("pass", "info") for check in self.checks)

    @property
    def failing(self) -> list[CheckResult]:
        return [check for check in self.checks if check.status in ("fail", "inconclusive")]


class PerturbedRisk(BaseModel):
    """Geodesic risk with multiplier ``coordinate`` scaled by exp(sign * perturbation)."""

    coordinate: int
    sign: Literal[1, -1]
    risk: float
    se: float
    excess: float
    expected_excess: float
    combined_se: float
    paired_se: float


class LocalOptimalityReport(BaseModel):
    """Single-coordinate perturbations of the optimal Cholesky-coordinate multipliers."""

    p: int
    n: int
    replicates: int
    seed: int
    perturbation: float
    optimum_risk: float
    optimum_se: float
    perturbed: list[PerturbedRisk] = Field(default_factory=list)
    checks: list[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.status in ("pass", "info") for check in self.checks)
