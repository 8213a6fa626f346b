"""Declarative YAML config schema plus sweep-grid machinery.

One document describes an analytic system model, a simulation scenario, or
both, plus an optional parameter sweep. The schema is versioned and strict:
unknown keys are rejected so a misspelled field fails loudly instead of
silently corrupting a study.

Sweep parameters are dotted paths into the document (list indices are
numeric segments), e.g. ``scenario.policy.interval`` or
``system.components.0.pattern.degree``. The grid is inclusive of both
endpoints and strictly monotone.
"""

from __future__ import annotations

import copy
from pathlib import Path
from typing import Annotated, Any, Literal, Union

import numpy as np
import yaml
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from . import composition, patterns, simulator
from .errors import ConfigError
from .events import EventModel

SCHEMA_VERSION = "1"

__all__ = [
    "SCHEMA_VERSION",
    "ConfigDocument",
    "ScenarioConfig",
    "SweepConfig",
    "SystemConfig",
    "apply_sweep_value",
    "parse_config",
    "parse_config_dict",
    "resolve_path",
    "scenario_from_config",
    "sweep_grid",
    "system_from_config",
]


class _StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


# --- pattern configs -------------------------------------------------------


class UnprotectedPattern(_StrictModel):
    kind: Literal["unprotected"] = "unprotected"


class FixedPattern(_StrictModel):
    kind: Literal["fixed"]
    reliability: float = Field(ge=0.0, le=1.0)
    overhead: float = Field(default=0.0, ge=0.0)


class DiagnosisPattern(_StrictModel):
    kind: Literal["diagnosis"]
    base_time: float = Field(ge=0.0)
    observed_params: int = Field(ge=1)
    inference_time: float = Field(ge=0.0)
    polling_frequency: float = Field(gt=0.0)


class ReconfigurationPattern(_StrictModel):
    kind: Literal["reconfiguration"]
    progress_fraction: float = Field(ge=0.0, le=1.0)
    component_count: int = Field(ge=2)
    downtime: float = Field(ge=0.0)
    component_reliabilities: list[float] = Field(min_length=1)
    corrected: bool = False

    @field_validator("component_reliabilities")
    @classmethod
    def _probs(cls, v: list[float]) -> list[float]:
        for r in v:
            if not (0.0 <= r <= 1.0):
                raise ValueError(f"component reliability must lie in [0, 1], got {r}")
        return v

    @model_validator(mode="after")
    def _lengths(self) -> "ReconfigurationPattern":
        if len(self.component_reliabilities) != self.component_count:
            raise ValueError(
                f"component_reliabilities must have component_count={self.component_count} "
                f"entries, got {len(self.component_reliabilities)}"
            )
        return self


class RollbackPattern(_StrictModel):
    kind: Literal["rollback"]
    regular_time: float = Field(ge=0.0)
    checkpoint_cost: float = Field(ge=0.0)
    checkpoint_rate: float = Field(gt=0.0)
    recovery_cost: float = Field(ge=0.0)
    mtti: float | None = Field(default=None, gt=0.0)


class RollforwardPattern(_StrictModel):
    kind: Literal["rollforward"]
    regular_time: float = Field(ge=0.0)
    checkpoint_cost: float = Field(default=0.0, ge=0.0)
    checkpoint_rate: float = Field(gt=0.0)
    recovery_cost: float = Field(ge=0.0)
    mode: Literal["checkpointing", "message_logging"] = "checkpointing"
    message_count: int | None = Field(default=None, ge=0)
    log_time_per_message: float | None = Field(default=None, ge=0.0)
    mtti: float | None = Field(default=None, gt=0.0)

    @model_validator(mode="after")
    def _logging_fields(self) -> "RollforwardPattern":
        if self.mode == "message_logging":
            if self.message_count is None or self.log_time_per_message is None:
                raise ValueError(
                    "message_logging mode requires message_count and log_time_per_message"
                )
        return self


class RedundancyPattern(_StrictModel):
    kind: Literal["redundancy"]
    serial_time: float = Field(gt=0.0)
    replicated_fraction: float = Field(ge=0.0, le=1.0)
    degree: int = Field(ge=1)
    mode: Literal["space", "time"] = "space"
    voting_time: float = Field(default=0.0, ge=0.0)
    replica_mtti: float = Field(gt=0.0)


class NVersionPattern(_StrictModel):
    kind: Literal["nversion"]
    version_success_probs: list[float] = Field(min_length=2)
    voter_failure_prob: float = Field(ge=0.0, le=1.0)
    mtti: float | None = Field(default=None, gt=0.0)

    @field_validator("version_success_probs")
    @classmethod
    def _probs(cls, v: list[float]) -> list[float]:
        for p in v:
            if not (0.0 <= p <= 1.0):
                raise ValueError(f"version success probability must lie in [0, 1], got {p}")
        return v


PatternConfig = Annotated[
    Union[
        UnprotectedPattern,
        FixedPattern,
        DiagnosisPattern,
        ReconfigurationPattern,
        RollbackPattern,
        RollforwardPattern,
        RedundancyPattern,
        NVersionPattern,
    ],
    Field(discriminator="kind"),
]


class ComponentConfig(_StrictModel):
    name: str = Field(min_length=1)
    pattern: PatternConfig = Field(default_factory=UnprotectedPattern)
    scope_fraction: float = Field(default=1.0, ge=0.0, le=1.0)


class SystemConfig(_StrictModel):
    base_time: float = Field(gt=0.0)
    mtti: float = Field(gt=0.0)
    time: float | None = Field(default=None, ge=0.0)
    components: list[ComponentConfig] = Field(min_length=1)

    @model_validator(mode="after")
    def _unique_names(self) -> "SystemConfig":
        names = [c.name for c in self.components]
        if len(set(names)) != len(names):
            raise ValueError(f"component names must be unique, got {names}")
        return self

    @property
    def evaluation_time(self) -> float:
        return self.base_time if self.time is None else self.time


# --- scenario configs ------------------------------------------------------


class NonePolicy(_StrictModel):
    kind: Literal["none"] = "none"


class CheckpointPolicyConfig(_StrictModel):
    kind: Literal["checkpoint"]
    interval: float = Field(gt=0.0)
    cost: float = Field(default=0.0, ge=0.0)
    recovery: float = Field(default=0.0, ge=0.0)


class ReplicationPolicyConfig(_StrictModel):
    kind: Literal["replication"]
    degree: int = Field(ge=1)
    mode: Literal["space", "time"] = "space"
    survival_threshold: int = Field(default=1, ge=1)
    voting_cost: float = Field(default=0.0, ge=0.0)

    @model_validator(mode="after")
    def _threshold(self) -> "ReplicationPolicyConfig":
        if self.survival_threshold > self.degree:
            raise ValueError(
                f"survival_threshold ({self.survival_threshold}) cannot exceed "
                f"degree ({self.degree})"
            )
        return self


class ReconfigurationPolicyConfig(_StrictModel):
    kind: Literal["reconfiguration"]
    components: int = Field(ge=1)
    downtime: float = Field(default=0.0, ge=0.0)
    min_components: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _min(self) -> "ReconfigurationPolicyConfig":
        if self.min_components > self.components:
            raise ValueError(
                f"min_components ({self.min_components}) cannot exceed "
                f"components ({self.components})"
            )
        return self


PolicyConfig = Annotated[
    Union[
        NonePolicy,
        CheckpointPolicyConfig,
        ReplicationPolicyConfig,
        ReconfigurationPolicyConfig,
    ],
    Field(discriminator="kind"),
]


class ScenarioConfig(_StrictModel):
    work: float = Field(gt=0.0)
    fault_mtti: float = Field(gt=0.0)
    node_count: int = Field(default=1, ge=1)
    mtti_scope: Literal["per_system", "per_node"] = "per_system"
    policy: PolicyConfig = Field(default_factory=NonePolicy)
    deadline: float | None = Field(default=None, gt=0.0)
    max_sim_time: float = Field(default=1e9, gt=0.0)


class SweepConfig(_StrictModel):
    parameter: str = Field(min_length=1)
    start: float
    stop: float
    steps: int = Field(ge=2)
    scale: Literal["linear", "log"] = "linear"

    @model_validator(mode="after")
    def _grid_sane(self) -> "SweepConfig":
        if self.start == self.stop:
            raise ValueError("sweep start and stop must differ (grid must be strictly monotone)")
        if self.scale == "log" and (self.start <= 0.0 or self.stop <= 0.0):
            raise ValueError("log-scale sweeps require positive start and stop")
        return self


class ConfigDocument(_StrictModel):
    """Top-level study description. ``version`` pins the schema."""

    version: str
    convention: Literal["literal", "survival"] = "literal"
    system: SystemConfig | None = None
    scenario: ScenarioConfig | None = None
    sweep: SweepConfig | None = None

    @field_validator("version")
    @classmethod
    def _version(cls, v: str) -> str:
        if v != SCHEMA_VERSION:
            raise ValueError(
                f"unsupported config schema version {v!r}; this build supports {SCHEMA_VERSION!r}"
            )
        return v

    @model_validator(mode="after")
    def _sections(self) -> "ConfigDocument":
        if self.system is None and self.scenario is None:
            raise ValueError("config must define a system section, a scenario section, or both")
        if self.sweep is not None:
            try:
                value = resolve_path(self.model_dump(), self.sweep.parameter)
            except KeyError as e:
                raise ValueError(f"sweep parameter: {e.args[0]}") from e
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValueError(
                    f"sweep parameter {self.sweep.parameter!r} must resolve to a numeric "
                    f"field, found {value!r}"
                )
        return self


# --- parsing ---------------------------------------------------------------


def _format_errors(exc: ValidationError) -> list[tuple[str, str]]:
    out = []
    for err in exc.errors():
        path = ".".join(str(p) for p in err["loc"]) or "<document>"
        out.append((path, err["msg"]))
    return out


def parse_config_dict(raw: Any) -> ConfigDocument:
    """Validate an already-loaded document; raises ConfigError with all problems."""
    if not isinstance(raw, dict):
        raise ConfigError([("<document>", f"expected a mapping, got {type(raw).__name__}")])
    try:
        return ConfigDocument.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(_format_errors(exc)) from exc


def parse_config(path: str | Path) -> ConfigDocument:
    """Load and validate a YAML config document from disk."""
    text = Path(path).read_text()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([("<document>", f"not valid YAML: {exc}")]) from exc
    return parse_config_dict(raw)


# --- sweeps ----------------------------------------------------------------


def sweep_grid(sweep: SweepConfig) -> list[float]:
    """Inclusive, strictly monotone grid of sweep values."""
    if sweep.scale == "log":
        values = np.geomspace(sweep.start, sweep.stop, sweep.steps)
    else:
        values = np.linspace(sweep.start, sweep.stop, sweep.steps)
    return [float(v) for v in values]


def resolve_path(document: dict, path: str) -> Any:
    """Walk a dotted path through nested dicts/lists; raises KeyError with context."""
    node: Any = document
    seen: list[str] = []
    for segment in path.split("."):
        seen.append(segment)
        if isinstance(node, list):
            try:
                node = node[int(segment)]
            except (ValueError, IndexError):
                raise KeyError(f"path {'.'.join(seen)!r} does not exist in the document")
        elif isinstance(node, dict) and segment in node:
            node = node[segment]
        else:
            raise KeyError(f"path {'.'.join(seen)!r} does not exist in the document")
    return node


def apply_sweep_value(document: dict, path: str, value: float) -> dict:
    """Deep-copy the document with the swept field set to ``value``.

    Integer-typed fields receive the rounded value so counts (degree,
    component numbers) sweep cleanly.
    """
    out = copy.deepcopy(document)
    segments = path.split(".")
    node: Any = out
    for segment in segments[:-1]:
        node = node[int(segment)] if isinstance(node, list) else node[segment]
    leaf = segments[-1]
    current = node[int(leaf)] if isinstance(node, list) else node[leaf]
    if isinstance(current, bool) or not isinstance(current, (int, float)):
        raise KeyError(f"path {path!r} does not resolve to a numeric field")
    new_value: int | float = value
    if isinstance(current, int):
        new_value = int(round(value))
    if isinstance(node, list):
        node[int(leaf)] = new_value
    else:
        node[leaf] = new_value
    return out


# --- conversion to core types ----------------------------------------------


def _pattern_from_config(p: Any, default_mtti: float) -> composition.PatternInstance | None:
    if isinstance(p, UnprotectedPattern):
        return None
    if isinstance(p, FixedPattern):
        return composition.FixedReliability(reliability=p.reliability, overhead=p.overhead)
    if isinstance(p, DiagnosisPattern):
        return patterns.DiagnosisParams(
            base_time=p.base_time,
            observed_params=p.observed_params,
            inference_time=p.inference_time,
            polling_frequency=p.polling_frequency,
        )
    if isinstance(p, ReconfigurationPattern):
        return patterns.ReconfigurationParams(
            progress_fraction=p.progress_fraction,
            component_count=p.component_count,
            reconfig_downtime=p.downtime,
            component_reliabilities=tuple(p.component_reliabilities),
            corrected=p.corrected,
        )
    if isinstance(p, RollbackPattern):
        return patterns.CheckpointParams(
            regular_time=p.regular_time,
            checkpoint_cost=p.checkpoint_cost,
            checkpoint_rate=p.checkpoint_rate,
            recovery_cost=p.recovery_cost,
            event_model=EventModel(p.mtti if p.mtti is not None else default_mtti),
        )
    if isinstance(p, RollforwardPattern):
        return patterns.CheckpointParams(
            regular_time=p.regular_time,
            checkpoint_cost=p.checkpoint_cost,
            checkpoint_rate=p.checkpoint_rate,
            recovery_cost=p.recovery_cost,
            event_model=EventModel(p.mtti if p.mtti is not None else default_mtti),
            mode=patterns.CheckpointMode(p.mode),
            message_count=p.message_count,
            log_time_per_message=p.log_time_per_message,
        )
    if isinstance(p, RedundancyPattern):
        return patterns.RedundancyParams(
            serial_time=p.serial_time,
            replicated_fraction=p.replicated_fraction,
            degree=p.degree,
            mode=patterns.RedundancyMode(p.mode),
            voting_time=p.voting_time,
            replica_mtti=p.replica_mtti,
        )
    if isinstance(p, NVersionPattern):
        return patterns.NVersionParams(
            version_success_probs=tuple(p.version_success_probs),
            voter_failure_prob=p.voter_failure_prob,
            event_model=EventModel(p.mtti if p.mtti is not None else default_mtti),
        )
    raise ConfigError([("pattern", f"unknown pattern kind {type(p).__name__}")])


def system_from_config(cfg: SystemConfig) -> composition.SystemModel:
    components = tuple(
        composition.Component(
            name=c.name,
            pattern=_pattern_from_config(c.pattern, cfg.mtti),
            scope_fraction=c.scope_fraction,
        )
        for c in cfg.components
    )
    return composition.SystemModel(
        components=components,
        base_time=cfg.base_time,
        event_model=EventModel(cfg.mtti),
    )


def scenario_from_config(cfg: ScenarioConfig) -> simulator.SimScenario:
    policy: simulator.Policy
    p = cfg.policy
    if isinstance(p, NonePolicy):
        policy = simulator.NoProtection()
    elif isinstance(p, CheckpointPolicyConfig):
        policy = simulator.CheckpointPolicy(interval=p.interval, cost=p.cost, recovery=p.recovery)
    elif isinstance(p, ReplicationPolicyConfig):
        policy = simulator.ReplicationPolicy(
            degree=p.degree,
            mode=simulator.ReplicationMode(p.mode),
            survival_threshold=p.survival_threshold,
            voting_cost=p.voting_cost,
        )
    elif isinstance(p, ReconfigurationPolicyConfig):
        policy = simulator.ReconfigurationPolicy(
            components=p.components,
            downtime=p.downtime,
            min_components=p.min_components,
        )
    else:
        raise ConfigError([("scenario.policy", f"unknown policy kind {type(p).__name__}")])
    return simulator.SimScenario(
        work=cfg.work,
        fault_mtti=cfg.fault_mtti,
        node_count=cfg.node_count,
        mtti_scope=simulator.MttiScope(cfg.mtti_scope),
        policy=policy,
        deadline=cfg.deadline,
        max_sim_time=cfg.max_sim_time,
    )
