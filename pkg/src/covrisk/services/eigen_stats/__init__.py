"""Eigenvalue statistics of Wishart matrices."""

from .density import DensityForm, joint_density_mass, log_density_values, log_joint_eigen_density
from .spectra import det_product_check, empirical_spectral_report, mp_geometric_mean

__all__ = [
    "DensityForm",
    "det_product_check",
    "empirical_spectral_report",
    "joint_density_mass",
    "log_density_values",
    "log_joint_eigen_density",
    "mp_geometric_mean",
]
