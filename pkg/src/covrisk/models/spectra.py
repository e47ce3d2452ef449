"""Eigenvalue spectrum models."""

from pydantic import BaseModel, ConfigDict, Field, model_validator


class SpectrumSample(BaseModel):
    """Eigenvalues of a W(I, n) draw, positive and sorted descending."""

    model_config = ConfigDict(frozen=True)

    eigenvalues: tuple[float, ...]
    p: int = Field(ge=1)
    n: int = Field(ge=1)

    @model_validator(mode="after")
    def check_spectrum(self) -> "SpectrumSample":
        if len(self.eigenvalues) != self.p:
            raise ValueError(f"Expected {self.p} eigenvalues, got {len(self.eigenvalues)}")
        if any(value <= 0 for value in self.eigenvalues):
            raise ValueError("Eigenvalues must be strictly positive")
        if any(b > a for a, b in zip(self.eigenvalues, self.eigenvalues[1:], strict=False)):
            raise ValueError("Eigenvalues must be sorted descending")
        return self

    @classmethod
    def from_unsorted(cls, values: "list[float] | tuple[float, ...]", n: int) -> "SpectrumSample":
        ordered = tuple(sorted((float(v) for v in values), reverse=True))
        return cls(eigenvalues=ordered, p=len(ordered), n=n)


class DetProductReport(BaseModel):
    """Monte Carlo mean of prod_i l_i / (n - p + i), which has expectation 1."""

    p: int
    n: int
    replicates: int
    seed: int
    mean: float
    se: float
    passed: bool


class SpectralReport(BaseModel):
    """Empirical log-eigenvalue statistics against their large-(p, n) limits.

    All eigenvalues are scaled by n. References are None where the limit is -inf.
    """

    p: int
    n: int
    replicates: int
    seed: int
    ratio: float  # y = p / n
    mean_log_eig: float
    mean_log_eig_se: float
    marchenko_pastur_reference: float
    finite_n_reference: float
    mean_log_min: float
    mean_log_min_se: float
    log_min_edge: float | None
    mean_log_max: float
    mean_log_max_se: float
    log_max_edge: float
    warnings: list[str] = Field(default_factory=list)
