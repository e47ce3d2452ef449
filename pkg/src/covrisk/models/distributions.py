"""Distribution summary models."""

import math

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ChiSquareLogMoments(BaseModel):
    """E[log X] and Var[log X] for X ~ chi-square with ``dof`` degrees of freedom."""

    model_config = ConfigDict(frozen=True)

    dof: float = Field(gt=0)
    mean_log: float
    var_log: float = Field(gt=0)

    @model_validator(mode="after")
    def check_jensen_gap(self) -> "ChiSquareLogMoments":
        """log is strictly concave, so E[log X] < log E[X] = log(dof)."""
        if not self.mean_log < math.log(self.dof):
            raise ValueError(f"mean_log {self.mean_log} must be below log(dof) = {math.log(self.dof)}")
        return self

    @property
    def geometric_mean(self) -> float:
        """exp(E[log X])."""
        return math.exp(self.mean_log)
