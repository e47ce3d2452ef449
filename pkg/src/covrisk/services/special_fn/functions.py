"""Log-gamma, digamma, trigamma and chi-square log-moments.

digamma and trigamma shift the argument above RECURRENCE_FLOOR with
psi(x) = psi(x+1) - 1/x and psi'(x) = psi'(x+1) + 1/x^2, then sum the
asymptotic Bernoulli series (six terms, error below 1e-13 there).
"""

import math

import numpy as np
import numpy.typing as npt
from scipy.special import gammaln, multigammaln

from covrisk.errors import DomainError
from covrisk.models.distributions import ChiSquareLogMoments

RECURRENCE_FLOOR = 8.0

# B_2k / 2k, k = 1..6
_DIGAMMA_TAIL = (1 / 12, -1 / 120, 1 / 252, -1 / 240, 1 / 132, -691 / 32760)
# B_2k, k = 1..6
_TRIGAMMA_TAIL = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730)


def _positive(x: npt.ArrayLike, name: str) -> npt.NDArray[np.float64]:
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(arr > 0):
        raise DomainError(f"{name} requires a positive argument")
    return arr


def _even_series(coeffs: tuple[float, ...], inv2: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """sum_k coeffs[k-1] * inv2**k by Horner's rule."""
    total = np.zeros_like(inv2)
    for c in reversed(coeffs):
        total = (total + c) * inv2
    return total


def _as_output(result: npt.NDArray[np.float64], x: npt.ArrayLike) -> float | npt.NDArray[np.float64]:
    result = np.reshape(result, np.shape(x))
    return float(result) if result.ndim == 0 else result


def log_gamma(x: npt.ArrayLike) -> float | npt.NDArray[np.float64]:
    """ln Gamma(x) for x > 0."""
    arr = _positive(x, "log_gamma")
    return _as_output(np.asarray(gammaln(arr), dtype=np.float64), x)


def multivariate_log_gamma(a: float, p: int) -> float:
    """ln Gamma_p(a) = p(p-1)/4 ln(pi) + sum_i ln Gamma(a - (i-1)/2), for a > (p-1)/2."""
    if p < 1 or a <= (p - 1) / 2:
        raise DomainError(f"multivariate_log_gamma needs a > (p-1)/2, got a={a}, p={p}")
    return float(multigammaln(a, p))


def digamma(x: npt.ArrayLike) -> float | npt.NDArray[np.float64]:
    """psi(x) = d/dx ln Gamma(x) for x > 0."""
    z = np.atleast_1d(_positive(x, "digamma")).copy()
    acc = np.zeros_like(z)
    while (small := z < RECURRENCE_FLOOR).any():
        acc[small] -= 1 / z[small]
        z[small] += 1
    result = acc + np.log(z) - 0.5 / z - _even_series(_DIGAMMA_TAIL, 1 / (z * z))
    return _as_output(result, x)


def trigamma(x: npt.ArrayLike) -> float | npt.NDArray[np.float64]:
    """psi'(x) for x > 0."""
    z = np.atleast_1d(_positive(x, "trigamma")).copy()
    acc = np.zeros_like(z)
    while (small := z < RECURRENCE_FLOOR).any():
        acc[small] += 1 / (z[small] * z[small])
        z[small] += 1
    inv = 1 / z
    result = acc + inv + 0.5 * inv * inv + inv * _even_series(_TRIGAMMA_TAIL, inv * inv)
    return _as_output(result, x)


def chisq_mean_log(dof: npt.ArrayLike) -> float | npt.NDArray[np.float64]:
    """E[log chi2_dof] = log 2 + psi(dof/2)."""
    arr = _positive(dof, "chisq_mean_log")
    return _as_output(math.log(2.0) + np.asarray(digamma(arr / 2)), dof)


def chisq_var_log(dof: npt.ArrayLike) -> float | npt.NDArray[np.float64]:
    """Var[log chi2_dof] = psi'(dof/2)."""
    arr = _positive(dof, "chisq_var_log")
    return _as_output(np.asarray(trigamma(arr / 2)), dof)


def chisq_log_moments(dof: float) -> ChiSquareLogMoments:
    """Mean and variance of log chi2_dof.

    Raises:
        DomainError: If dof <= 0
    """
    if not dof > 0:
        raise DomainError(f"Degrees of freedom must be positive, got {dof}")
    return ChiSquareLogMoments(dof=dof, mean_log=float(chisq_mean_log(dof)), var_log=float(chisq_var_log(dof)))
