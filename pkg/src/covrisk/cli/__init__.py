"""Command-line front end."""

from .commands import (
    EXIT_FAILURE,
    EXIT_OK,
    EXIT_USAGE,
    cmd_calibrate,
    cmd_decompose,
    cmd_risk_table,
    cmd_sample,
    cmd_spectra,
    cmd_verify,
)
from .matrix_io import format_matrix, parse_matrix, read_matrix

__all__ = [
    "EXIT_FAILURE",
    "EXIT_OK",
    "EXIT_USAGE",
    "cmd_calibrate",
    "cmd_decompose",
    "cmd_risk_table",
    "cmd_sample",
    "cmd_spectra",
    "cmd_verify",
    "format_matrix",
    "parse_matrix",
    "read_matrix",
]
