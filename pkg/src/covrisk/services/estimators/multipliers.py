"""Diagonal correction constants, indexed i = 1..p."""

import numpy as np

from covrisk.errors import DomainError
from covrisk.services.matrix_core.kernels import FloatArray
from covrisk.services.special_fn import chisq_mean_log


def _index(p: int, n: int) -> FloatArray:
    if p < 1 or n < p:
        raise DomainError(f"Need n >= p >= 1, got p={p}, n={n}")
    return np.arange(1, p + 1, dtype=np.float64)


def chisq_dofs(p: int, n: int) -> FloatArray:
    """n - i + 1: degrees of freedom of the i-th squared Bartlett diagonal."""
    return n - _index(p, n) + 1


def stein_divisors(p: int, n: int) -> FloatArray:
    """d_S,ii = n + p - 2i + 1."""
    return n + p - 2 * _index(p, n) + 1


def iwasawa_divisors(p: int, n: int) -> FloatArray:
    """d_0,ii = n - i + 1."""
    return chisq_dofs(p, n)


def geodesic_multipliers(p: int, n: int) -> FloatArray:
    """exp(-E[log chi2_{n-i+1}]), the log-centering scale of each pivot."""
    return np.exp(-np.asarray(chisq_mean_log(chisq_dofs(p, n)), dtype=np.float64))
