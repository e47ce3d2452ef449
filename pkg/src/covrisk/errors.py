"""Exception hierarchy for covrisk.

Library code raises these; only ``covrisk.main`` turns them into exit codes.
"""


class CovRiskError(Exception):
    """Base class for all covrisk errors."""


class DomainError(CovRiskError, ValueError):
    """An argument lies outside the domain of the operation."""


class NotPositiveDefiniteError(CovRiskError, ArithmeticError):
    """A matrix expected to be symmetric positive definite is not."""


class NoConvergenceError(CovRiskError, ArithmeticError):
    """An iterative solver exceeded its iteration limit."""


class DimensionMismatchError(CovRiskError, ValueError):
    """Operands have incompatible shapes or dimensions."""


class UnsupportedError(CovRiskError):
    """The requested combination has no implementation (e.g. no closed form)."""


class MissingCalibrationError(CovRiskError, ValueError):
    """A rotation-equivariant estimator was requested without a spectral calibration."""


class CalibrationMismatchError(CovRiskError, ValueError):
    """A spectral calibration does not match the requested (p, n)."""


class MatrixFormatError(CovRiskError, ValueError):
    """A matrix text file could not be parsed."""
