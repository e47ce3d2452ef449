"""Joint density of the ordered eigenvalues of W(I, n).

Two forms are provided. ``as_stated`` uses per-index constants
Gamma(3/2) / (Gamma(1 + i/2) Gamma((n-p+i)/2)) and exponents (n-p+i)/2 - 1; it
reduces to the chi2_n density at p = 1 but is not normalized for p >= 2.
``exact`` is the normalized density
c * exp(-sum l/2) * prod l^((n-p-1)/2) * prod_{i<j} (l_i - l_j) with
c = pi^(p^2/2) / (2^(np/2) Gamma_p(n/2) Gamma_p(p/2)).
"""

import math
from typing import Literal

import numpy as np
from scipy.integrate import dblquad

from covrisk.errors import DomainError, UnsupportedError
from covrisk.models.spectra import SpectrumSample
from covrisk.services.matrix_core.kernels import FloatArray
from covrisk.services.special_fn import log_gamma, multivariate_log_gamma

DensityForm = Literal["as_stated", "exact"]


def _vandermonde_log(eigenvalues: FloatArray) -> float:
    rows, cols = np.triu_indices(eigenvalues.shape[0], k=1)
    gaps = eigenvalues[rows] - eigenvalues[cols]
    if np.any(gaps <= 0):
        raise DomainError("Joint eigenvalue density needs distinct eigenvalues")
    return float(np.sum(np.log(gaps)))


def log_density_values(eigenvalues: FloatArray, n: int, form: DensityForm = "as_stated") -> float:
    """Log density at a descending vector of distinct positive eigenvalues."""
    p = eigenvalues.shape[0]
    if n < p:
        raise DomainError(f"Need n >= p, got n={n}, p={p}")
    if np.any(eigenvalues <= 0):
        raise DomainError("Eigenvalues must be strictly positive")
    logs = np.log(eigenvalues)
    vandermonde = _vandermonde_log(eigenvalues)

    if form == "exact":
        log_c = (
            (p * p / 2) * math.log(math.pi)
            - (n * p / 2) * math.log(2)
            - multivariate_log_gamma(n / 2, p)
            - multivariate_log_gamma(p / 2, p)
        )
        return log_c - float(np.sum(eigenvalues)) / 2 + (n - p - 1) / 2 * float(np.sum(logs)) + vandermonde

    if form != "as_stated":
        raise DomainError(f"Unknown density form {form!r}")
    i = np.arange(1, p + 1, dtype=np.float64)
    shape = (n - p + i) / 2
    constants = log_gamma(1.5) - np.asarray(log_gamma(1 + i / 2)) - np.asarray(log_gamma(shape))
    terms = constants + (shape - 1) * logs - eigenvalues / 2
    return -(n * p / 2) * math.log(2) + math.fsum(terms.tolist()) + vandermonde


def log_joint_eigen_density(spectrum: SpectrumSample, form: DensityForm = "as_stated") -> float:
    """Log joint density of ``spectrum`` under W(I, spectrum.n).

    Raises:
        DomainError: On tied eigenvalues
    """
    return log_density_values(np.asarray(spectrum.eigenvalues, dtype=np.float64), spectrum.n, form)


def joint_density_mass(n: int, form: DensityForm = "exact", p: int = 2) -> float:
    """Integral of the joint density over l_1 > l_2 > 0 by adaptive quadrature.

    Raises:
        UnsupportedError: For p other than 2
    """
    if p != 2:
        raise UnsupportedError("Quadrature mass is implemented for p = 2 only")
    if n < p:
        raise DomainError(f"Need n >= p, got n={n}, p={p}")

    def density(l2: float, l1: float) -> float:
        if not l1 > l2 > 0:
            return 0.0
        return math.exp(log_density_values(np.array([l1, l2]), n, form))

    mass, _ = dblquad(density, 0, np.inf, 0, lambda l1: l1, epsabs=1e-10, epsrel=1e-8)
    return float(mass)
