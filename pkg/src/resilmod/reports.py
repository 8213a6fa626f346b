"""Report document model and its two renderings (CSV and structured JSON).

Reports are fully deterministic: no timestamps, stable column orders frozen
per schema version, floats rendered with shortest round-trip repr. Each
report echoes the parsed config, the master seed and the toolkit version,
which is enough provenance to reproduce it exactly.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Any

from pydantic import BaseModel, ConfigDict

EVAL_COLUMNS = [
    "row",
    "parameter",
    "value",
    "time",
    "convention",
    "total_overhead",
    "system_reliability",
    "reliability_clamped",
    "error",
    "diagnostics",
]

SIMULATE_COLUMNS = [
    "row",
    "parameter",
    "value",
    "trials",
    "completed",
    "completion_fraction",
    "mean_time",
    "stderr_time",
    "failures",
    "total_events",
    "mean_wasted_work",
    "error",
    "diagnostics",
]

COMPARE_COLUMNS = [
    "row",
    "parameter",
    "value",
    "time",
    "trials",
    "analytic_literal",
    "analytic_survival",
    "empirical",
    "empirical_stderr",
    "gap_literal_abs",
    "gap_literal_rel",
    "gap_survival_abs",
    "gap_survival_rel",
    "time_analytic",
    "time_empirical",
    "time_empirical_stderr",
    "error",
    "diagnostics",
]

COLUMNS_BY_COMMAND = {
    "eval": EVAL_COLUMNS,
    "simulate": SIMULATE_COLUMNS,
    "compare": COMPARE_COLUMNS,
}


class ReportDocument(BaseModel):
    """Inputs echoed plus one result row per sweep point (or a single row)."""

    model_config = ConfigDict(extra="forbid")

    toolkit_version: str
    config_version: str
    command: str
    convention: str
    trials: int | None = None
    master_seed: int | None = None
    columns: list[str]
    rows: list[dict[str, Any]]
    diagnostics: list[str] = []
    component_detail: list[dict[str, Any]] | None = None
    config: dict[str, Any]
    trace: list[str] | None = None


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(report: ReportDocument) -> str:
    """One header row plus one row per result, in the frozen column order."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([_cell(row.get(col)) for col in report.columns])
    return buf.getvalue()


def render_structured(report: ReportDocument) -> str:
    """Machine-readable rendering: the whole document as stable JSON."""
    return json.dumps(report.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"
