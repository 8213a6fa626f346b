"""Batch engine: turn a config document into a report.

Three entry points mirror the service endpoints: analytic evaluation,
simulation, and side-by-side comparison. Each expands the optional sweep
into rows; a row that fails validation or evaluation is reported in place
(with its error message) without aborting the rest of the sweep.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any

from . import __version__
from .composition import EvaluationReport, SystemModel, evaluate_system
from .config import (
    ConfigDocument,
    RedundancyPattern,
    apply_sweep_value,
    parse_config_dict,
    scenario_from_config,
    sweep_grid,
    system_from_config,
)
from .errors import ConfigError, DomainError, MappingError
from .events import Convention
from .reports import COLUMNS_BY_COMMAND, ReportDocument
from .simulator import EnsembleStats, run_ensemble

__all__ = ["run_compare", "run_eval", "run_simulate"]


@dataclass(frozen=True)
class _Row:
    index: int
    parameter: str | None
    value: float | None
    config: ConfigDocument | None
    error: str | None = None


def _expand_rows(config: ConfigDocument) -> list[_Row]:
    if config.sweep is None:
        return [_Row(0, None, None, config)]
    base = config.model_dump()
    rows = []
    for i, value in enumerate(sweep_grid(config.sweep)):
        try:
            doc = parse_config_dict(apply_sweep_value(base, config.sweep.parameter, value))
            rows.append(_Row(i, config.sweep.parameter, value, doc))
        except (ConfigError, KeyError) as e:
            rows.append(_Row(i, config.sweep.parameter, value, None, error=str(e)))
    return rows


def _convention(config: ConfigDocument, override: str | None) -> Convention:
    return Convention(override) if override else Convention(config.convention)


def _base_report(config: ConfigDocument, command: str, convention: Convention) -> dict[str, Any]:
    return {
        "toolkit_version": __version__,
        "config_version": config.version,
        "command": command,
        "convention": convention.value,
        "columns": list(COLUMNS_BY_COMMAND[command]),
        "config": config.model_dump(mode="json"),
    }


def _component_detail(row_index: int, report: EvaluationReport) -> list[dict[str, Any]]:
    detail = []
    for name, out in report.per_component:
        detail.append(
            {
                "row": row_index,
                "component": name,
                "time_estimate": out.time_estimate,
                "time_kind": out.time_kind,
                "reliability": None if out.reliability is None else out.reliability.value,
                "clamped": None if out.reliability is None else out.reliability.clamped,
                "notes": list(out.notes),
            }
        )
    return detail


def run_eval(config: ConfigDocument, convention_override: str | None = None) -> ReportDocument:
    """Analytic evaluation: one row per sweep point."""
    if config.system is None:
        raise MappingError("eval requires a system section in the config")
    convention = _convention(config, convention_override)
    rows: list[dict[str, Any]] = []
    detail: list[dict[str, Any]] = []
    diagnostics: list[str] = []
    for row in _expand_rows(config):
        cells: dict[str, Any] = {
            "row": row.index,
            "parameter": row.parameter,
            "value": row.value,
            "convention": convention.value,
        }
        if row.error is not None or row.config is None or row.config.system is None:
            cells["error"] = row.error or "system section missing after sweep substitution"
            rows.append(cells)
            continue
        t = row.config.system.evaluation_time
        cells["time"] = t
        try:
            system = system_from_config(row.config.system)
            report = evaluate_system(system, t, convention)
        except DomainError as e:
            cells["error"] = str(e)
            rows.append(cells)
            continue
        cells["total_overhead"] = report.total_overhead
        cells["system_reliability"] = report.system_reliability.value
        cells["reliability_clamped"] = report.system_reliability.clamped
        cells["diagnostics"] = "; ".join(report.diagnostics)
        rows.append(cells)
        detail.extend(_component_detail(row.index, report))
    return ReportDocument(
        **_base_report(config, "eval", convention),
        rows=rows,
        diagnostics=diagnostics,
        component_detail=detail,
    )


def _ensemble_cells(stats: EnsembleStats) -> dict[str, Any]:
    return {
        "trials": stats.trials,
        "completed": stats.completed,
        "completion_fraction": stats.completion_fraction,
        "mean_time": stats.mean_time,
        "stderr_time": stats.stderr_time,
        "failures": int(stats.failure_times.size),
        "total_events": stats.total_events,
        "mean_wasted_work": stats.total_wasted_work / stats.trials,
    }


def _trace_lines(row_index: int, stats: EnsembleStats) -> list[str]:
    lines = []
    if stats.traces is None:
        return lines
    for trial, records in enumerate(stats.traces):
        for record in records:
            payload = {"row": row_index, "trial": trial, **record}
            lines.append(json.dumps(payload, sort_keys=True))
    return lines


def run_simulate(
    config: ConfigDocument,
    trials: int,
    master_seed: int,
    convention_override: str | None = None,
    collect_traces: bool = False,
) -> ReportDocument:
    """Monte Carlo simulation of the scenario: one row per sweep point."""
    if config.scenario is None:
        raise MappingError("simulate requires a scenario section in the config")
    convention = _convention(config, convention_override)
    rows: list[dict[str, Any]] = []
    diagnostics: list[str] = []
    trace: list[str] = []
    for row in _expand_rows(config):
        cells: dict[str, Any] = {"row": row.index, "parameter": row.parameter, "value": row.value}
        if row.error is not None or row.config is None or row.config.scenario is None:
            cells["error"] = row.error or "scenario section missing after sweep substitution"
            rows.append(cells)
            continue
        try:
            scenario = scenario_from_config(row.config.scenario)
            stats = run_ensemble(scenario, trials, master_seed, collect_traces=collect_traces)
        except DomainError as e:
            cells["error"] = str(e)
            rows.append(cells)
            continue
        cells.update(_ensemble_cells(stats))
        cells["diagnostics"] = f"mtti_scope={row.config.scenario.mtti_scope}"
        rows.append(cells)
        trace.extend(_trace_lines(row.index, stats))
    diagnostics.append(f"fault mtti scope: {config.scenario.mtti_scope}")
    return ReportDocument(
        **_base_report(config, "simulate", convention),
        trials=trials,
        master_seed=master_seed,
        rows=rows,
        diagnostics=diagnostics,
        trace=trace if collect_traces else None,
    )


def _governing_mtti(system_cfg) -> float:
    """The mean time to interrupt a comparison scenario must reproduce.

    Redundancy components carry their own per-replica value; otherwise the
    system-level event model governs.
    """
    for component in system_cfg.components:
        if isinstance(component.pattern, RedundancyPattern):
            return component.pattern.replica_mtti
    return system_cfg.mtti


def _check_mapping(config: ConfigDocument) -> None:
    expected = _governing_mtti(config.system)
    actual = config.scenario.fault_mtti
    if not math.isclose(expected, actual, rel_tol=1e-9):
        raise MappingError(
            "system and scenario sections disagree: the system model's governing "
            f"mtti is {expected} but the scenario's fault_mtti is {actual}"
        )


def run_compare(
    config: ConfigDocument,
    trials: int,
    master_seed: int,
    collect_traces: bool = False,
) -> ReportDocument:
    """Side-by-side analytic vs simulated results, one row per sweep point.

    Ensembles are cached on the scenario contents, so a sweep that only
    moves analytic parameters (for example the evaluation time) runs one
    simulation and reads the empirical curve at each point.
    """
    if config.system is None or config.scenario is None:
        raise MappingError("compare requires both system and scenario sections")
    _check_mapping(config)
    rows: list[dict[str, Any]] = []
    detail: list[dict[str, Any]] = []
    trace: list[str] = []
    ensembles: dict[str, EnsembleStats] = {}
    for row in _expand_rows(config):
        cells: dict[str, Any] = {"row": row.index, "parameter": row.parameter, "value": row.value}
        if row.error is not None or row.config is None:
            cells["error"] = row.error or "invalid sweep row"
            rows.append(cells)
            continue
        if row.config.system is None or row.config.scenario is None:
            cells["error"] = "compare requires both system and scenario sections"
            rows.append(cells)
            continue
        t = row.config.system.evaluation_time
        cells["time"] = t
        cells["trials"] = trials
        try:
            _check_mapping(row.config)
            system = system_from_config(row.config.system)
            literal = evaluate_system(system, t, Convention.LITERAL)
            survival = evaluate_system(system, t, Convention.SURVIVAL)
            key = json.dumps(row.config.scenario.model_dump(mode="json"), sort_keys=True)
            if key not in ensembles:
                scenario = scenario_from_config(row.config.scenario)
                ensembles[key] = run_ensemble(
                    scenario, trials, master_seed, collect_traces=collect_traces
                )
            stats = ensembles[key]
        except DomainError as e:
            cells["error"] = str(e)
            rows.append(cells)
            continue
        p_hat = stats.reliability_by(t)
        stderr = math.sqrt(p_hat * (1.0 - p_hat) / trials)
        lit = literal.system_reliability.value
        sur = survival.system_reliability.value
        cells.update(
            {
                "analytic_literal": lit,
                "analytic_survival": sur,
                "empirical": p_hat,
                "empirical_stderr": stderr,
                "gap_literal_abs": p_hat - lit,
                "gap_literal_rel": (p_hat - lit) / lit if lit != 0.0 else None,
                "gap_survival_abs": p_hat - sur,
                "gap_survival_rel": (p_hat - sur) / sur if sur != 0.0 else None,
                "time_analytic": literal.total_overhead,
                "time_empirical": stats.mean_time,
                "time_empirical_stderr": stats.stderr_time,
                "diagnostics": "; ".join(literal.diagnostics),
            }
        )
        rows.append(cells)
        detail.extend(_component_detail(row.index, literal))
    if collect_traces:
        for key_index, stats in enumerate(ensembles.values()):
            trace.extend(_trace_lines(key_index, stats))
    return ReportDocument(
        **_base_report(config, "compare", Convention(config.convention)),
        trials=trials,
        master_seed=master_seed,
        rows=rows,
        diagnostics=[],
        component_detail=detail,
        trace=trace if collect_traces else None,
    )
