"""Rendering of command results as aligned text, CSV or JSON."""

import csv
import io
import json
from collections.abc import Sequence
from typing import Any

from covrisk.models.risk import CheckResult, RiskReport
from covrisk.models.run_config import OutputFormat

from .matrix_io import format_number

MISSING = "—"

RISK_COLUMNS = (
    "estimator",
    "loss",
    "coordinates",
    "analytic",
    "formula",
    "reference",
    "mc_mean",
    "mc_se",
    "replicates",
    "seed",
    "flagged",
)


def _cell(value: object, missing: str) -> str:
    if value is None:
        return missing
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return format_number(value)
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def _aligned(header: Sequence[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths, strict=True)).rstrip()]
    lines.extend("  ".join(c.ljust(w) for c, w in zip(row, widths, strict=True)).rstrip() for row in rows)
    return "\n".join(lines) + "\n"


def _csv(header: Sequence[str], rows: list[list[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def to_json(payload: object) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def render_risk_rows(rows: list[RiskReport], output_format: OutputFormat, context: dict[str, Any]) -> str:
    """One line per (estimator, loss); analytic shows the missing marker without a closed form."""
    if output_format is OutputFormat.JSON:
        return to_json({**context, "rows": [row.model_dump(mode="json") for row in rows]})
    missing = "" if output_format is OutputFormat.CSV else MISSING
    cells = [[_cell(getattr(row, column), missing) for column in RISK_COLUMNS] for row in rows]
    return _csv(RISK_COLUMNS, cells) if output_format is OutputFormat.CSV else _aligned(RISK_COLUMNS, cells)


def render_checks(checks: list[CheckResult], output_format: OutputFormat, context: dict[str, Any]) -> str:
    """Verification verdicts, one entry per check."""
    if output_format is OutputFormat.JSON:
        return to_json({**context, "checks": [check.model_dump(mode="json") for check in checks]})
    header = ("status", "check", "detail")
    cells = [[check.status, check.name, check.detail] for check in checks]
    return _csv(header, cells) if output_format is OutputFormat.CSV else _aligned(header, cells)


def render_mapping(values: dict[str, Any], output_format: OutputFormat) -> str:
    """Flat key/value report."""
    if output_format is OutputFormat.JSON:
        return to_json(values)
    cells = [[key, _cell(value, MISSING)] for key, value in values.items()]
    if output_format is OutputFormat.CSV:
        return _csv(("field", "value"), cells)
    return _aligned(("field", "value"), cells)
