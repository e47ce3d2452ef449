"""Plain-text matrix files.

The first non-blank line holds p; the next p non-blank lines hold p
whitespace-separated decimals each. Lines starting with ``#`` are ignored.
"""

from pathlib import Path

import numpy as np

from covrisk.errors import MatrixFormatError
from covrisk.logger import get_logger
from covrisk.services.matrix_core.kernels import FloatArray

logger = get_logger(__name__)

ASYMMETRY_WARNING = 1e-8


def parse_matrix(text: str, source: str = "<text>") -> FloatArray:
    """Parse a matrix and return its symmetric part (M + M') / 2.

    Raises:
        MatrixFormatError: If the text does not follow the format
    """
    lines = [line.strip() for line in text.splitlines()]
    lines = [line for line in lines if line and not line.startswith("#")]
    if not lines:
        raise MatrixFormatError(f"{source}: empty matrix file")

    try:
        p = int(lines[0])
    except ValueError as e:
        raise MatrixFormatError(f"{source}: first line must be the dimension, got {lines[0]!r}") from e
    if p < 1:
        raise MatrixFormatError(f"{source}: dimension must be positive, got {p}")
    if len(lines) != p + 1:
        raise MatrixFormatError(f"{source}: expected {p} rows, got {len(lines) - 1}")

    rows = []
    for k, line in enumerate(lines[1:], start=1):
        try:
            row = [float(token) for token in line.split()]
        except ValueError as e:
            raise MatrixFormatError(f"{source}: row {k} is not numeric: {line!r}") from e
        if len(row) != p:
            raise MatrixFormatError(f"{source}: row {k} has {len(row)} entries, expected {p}")
        rows.append(row)

    matrix = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(matrix)):
        raise MatrixFormatError(f"{source}: entries must be finite")
    asymmetry = float(np.max(np.abs(matrix - matrix.T)))
    if asymmetry > ASYMMETRY_WARNING:
        logger.warning("Matrix is not symmetric, using its symmetric part", source=source, asymmetry=asymmetry)
    return (matrix + matrix.T) / 2


def read_matrix(path: Path) -> FloatArray:
    """Read a matrix file.

    Raises:
        MatrixFormatError: If the file is missing or malformed
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise MatrixFormatError(f"Cannot read matrix file {path}: {e}") from e
    return parse_matrix(text, str(path))


def format_number(value: float) -> str:
    """Shortest round-trip decimal; identical across runs for identical floats."""
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def format_matrix(matrix: FloatArray) -> str:
    """Render ``matrix`` in the file format read by ``parse_matrix``."""
    lines = [str(matrix.shape[0])]
    lines.extend(" ".join(format_number(v) for v in row) for row in matrix)
    return "\n".join(lines) + "\n"
