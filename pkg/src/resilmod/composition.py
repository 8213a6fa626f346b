"""Series composition of per-component pattern models into a whole system.

A system is an ordered list of components, each optionally protected by one
pattern. The composition assumes independent components in series: the
system operates only while every component does, so system reliability is
the product of component reliabilities, and performance overhead is
additive. State-space composition methods (Markov chains, Petri nets, fault
trees) are out of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

from .errors import DomainError
from .events import (
    Convention,
    EventModel,
    Probability,
    interrupt_probability,
    oriented,
)
from .patterns import (
    NVERSION_WEIGHT_NOTE,
    CheckpointParams,
    DiagnosisParams,
    ModelOutput,
    NVersionParams,
    ReconfigurationParams,
    RedundancyParams,
    diagnosis_overhead,
    nversion_reliability,
    reconfiguration_performance,
    reconfiguration_reliability,
    redundancy_reliability,
    redundancy_time,
    rollforward_time,
)

__all__ = [
    "Component",
    "EvaluationReport",
    "FixedReliability",
    "PatternInstance",
    "SystemModel",
    "evaluate_system",
    "series_reliability",
    "total_overhead",
]

MIXED_UNITS_NOTE = (
    "overhead sum mixes dimensionless exposure ratios with plain times; "
    "interpret total_overhead with care"
)


@dataclass(frozen=True)
class FixedReliability:
    """Directly supplied component reliability (and optional overhead).

    Convention-independent: the caller states the reliability, there is no
    formula to re-orient.
    """

    reliability: float
    overhead: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.reliability <= 1.0):
            raise DomainError(f"reliability must lie in [0, 1], got {self.reliability}")
        if math.isnan(self.overhead) or self.overhead < 0.0:
            raise DomainError(f"overhead must be nonnegative, got {self.overhead}")


PatternInstance = Union[
    FixedReliability,
    DiagnosisParams,
    ReconfigurationParams,
    CheckpointParams,
    RedundancyParams,
    NVersionParams,
]


@dataclass(frozen=True)
class Component:
    """One system component, optionally protected by a pattern.

    ``pattern`` None means unprotected: the component's reliability is the
    base event model's value under the active convention. ``scope_fraction``
    records the share of the component's state covered by the protection
    domain; it is reported, and for redundancy the replicated fraction plays
    this role inside the pattern parameters themselves.
    """

    name: str
    pattern: PatternInstance | None = None
    scope_fraction: float = 1.0

    def __post_init__(self) -> None:
        if not self.name:
            raise DomainError("component name must be nonempty")
        if not (0.0 <= self.scope_fraction <= 1.0):
            raise DomainError(f"scope_fraction must lie in [0, 1], got {self.scope_fraction}")


@dataclass(frozen=True)
class SystemModel:
    """Ordered components, a base mission time and the system event model."""

    components: tuple[Component, ...]
    base_time: float
    event_model: EventModel

    def __post_init__(self) -> None:
        if not self.components:
            raise DomainError("system must have at least one component")
        names = [c.name for c in self.components]
        if len(set(names)) != len(names):
            raise DomainError(f"component names must be unique, got {names}")
        if not self.base_time > 0.0:
            raise DomainError(f"base_time must be positive, got {self.base_time}")


@dataclass(frozen=True)
class EvaluationReport:
    """Per-component outputs plus the composed system figures."""

    per_component: tuple[tuple[str, ModelOutput], ...]
    system_reliability: Probability
    total_overhead: float
    diagnostics: tuple[str, ...]


def series_reliability(
    values: Sequence[float | Probability],
    convention: Convention = Convention.LITERAL,
) -> Probability:
    """Series system reliability: the product of component reliabilities.

    The product of values in [0, 1] stays in [0, 1], so no clamping can
    occur. The convention argument exists for symmetry with the pattern
    reliabilities; component values are expected to be already oriented, so
    the default leaves the product untouched.
    """
    floats = [float(v) for v in values]
    if not floats:
        raise DomainError("series_reliability requires a nonempty list")
    for v in floats:
        if math.isnan(v) or not (0.0 <= v <= 1.0):
            raise DomainError(f"component reliability must lie in [0, 1], got {v}")
    return Probability(math.prod(floats))


def total_overhead(outputs: Sequence[ModelOutput]) -> float:
    """Sum of per-component time estimates. Units are the caller's contract."""
    if not outputs:
        raise DomainError("total_overhead requires a nonempty list")
    return math.fsum(o.time_estimate for o in outputs)


def _evaluate_component(
    component: Component,
    system: SystemModel,
    t: float,
    convention: Convention,
) -> ModelOutput:
    pattern = component.pattern
    baseline = oriented(interrupt_probability(t, system.event_model), convention)

    if pattern is None:
        return ModelOutput(time_estimate=0.0, reliability=baseline)
    if isinstance(pattern, FixedReliability):
        return ModelOutput(
            time_estimate=pattern.overhead,
            reliability=Probability(pattern.reliability),
            notes=("fixed reliability supplied directly; convention not applied",),
        )
    if isinstance(pattern, DiagnosisParams):
        out = diagnosis_overhead(pattern)
        return ModelOutput(
            time_estimate=out.time_estimate,
            reliability=baseline,
            notes=out.notes
            + ("fault diagnosis does not change reliability; base event-model value used",),
        )
    if isinstance(pattern, ReconfigurationParams):
        if len(pattern.component_reliabilities) != pattern.component_count:
            raise DomainError(
                "reconfiguration needs one reliability per component: expected "
                f"{pattern.component_count}, got {len(pattern.component_reliabilities)}"
            )
        out = reconfiguration_performance(pattern)
        rel = reconfiguration_reliability(pattern.component_reliabilities, convention)
        return ModelOutput(time_estimate=out.time_estimate, reliability=rel, notes=out.notes)
    if isinstance(pattern, CheckpointParams):
        return rollforward_time(pattern, convention)
    if isinstance(pattern, RedundancyParams):
        out = redundancy_time(pattern)
        rel = redundancy_reliability(t, pattern, convention)
        return ModelOutput(time_estimate=out.time_estimate, reliability=rel, notes=out.notes)
    if isinstance(pattern, NVersionParams):
        rel = nversion_reliability(t, pattern, convention)
        return ModelOutput(
            time_estimate=0.0,
            reliability=rel,
            notes=(
                "no performance expression for the n-version pattern; overhead 0 recorded",
                NVERSION_WEIGHT_NOTE,
            ),
        )
    raise DomainError(f"unknown pattern instance type {type(pattern).__name__}")


def evaluate_system(
    system: SystemModel, t: float, convention: Convention = Convention.LITERAL
) -> EvaluationReport:
    """Evaluate every component's pattern at time t and compose the system.

    Component reliabilities multiply (series assumption); overheads add.
    Component diagnostics are aggregated with the component name attached,
    and evaluation errors propagate the same way.
    """
    if math.isnan(t) or t < 0.0:
        raise DomainError(f"time must be nonnegative, got {t}")
    outputs: list[tuple[str, ModelOutput]] = []
    diagnostics: list[str] = []
    for component in system.components:
        try:
            out = _evaluate_component(component, system, t, convention)
        except DomainError as e:
            raise DomainError(f"component {component.name!r}: {e}") from e
        outputs.append((component.name, out))
        for note in out.notes:
            diagnostics.append(f"{component.name}: {note}")
        if out.reliability is not None and out.reliability.clamped:
            diagnostics.append(f"{component.name}: raw reliability left [0, 1] and was clamped")

    kinds = {out.time_kind for _, out in outputs if out.time_estimate != 0.0}
    if len(kinds) > 1:
        diagnostics.append(MIXED_UNITS_NOTE)

    reliabilities = [out.reliability for _, out in outputs]
    system_rel = series_reliability([r for r in reliabilities if r is not None])
    overhead = total_overhead([out for _, out in outputs])
    return EvaluationReport(
        per_component=tuple(outputs),
        system_reliability=system_rel,
        total_overhead=overhead,
        diagnostics=tuple(diagnostics),
    )
