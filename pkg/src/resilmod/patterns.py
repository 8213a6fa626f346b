"""Closed-form performance and reliability evaluators for resilience patterns.

One evaluator per pattern family:

* fault diagnosis (monitoring overhead, no reliability change)
* reconfiguration (degraded operation after isolating a failed component)
* rollback recovery (checkpoint/restart)
* roll-forward recovery (checkpointing or message logging)
* redundancy (space or time replication with majority voting)
* n-version design diversity (independent implementations plus a voter)

Every function is pure and every returned probability is a ``Probability``
carrying a ``clamped`` flag. Reliability results honor the evaluation-wide
``Convention``: LITERAL evaluates the formula as written, SURVIVAL returns
its complement. The checkpoint formulas yield a dimensionless ratio of the
exposure window to the mean time to interrupt rather than a plain time;
outputs label this via ``time_kind`` so downstream sums can flag mixed units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import DomainError
from .events import Convention, EventModel, Probability, oriented

__all__ = [
    "CheckpointMode",
    "CheckpointParams",
    "DiagnosisParams",
    "ModelOutput",
    "NVersionParams",
    "ReconfigurationParams",
    "RedundancyMode",
    "RedundancyParams",
    "diagnosis_overhead",
    "nversion_exclusive_success",
    "nversion_failure_density",
    "nversion_reliability",
    "reconfiguration_performance",
    "reconfiguration_reliability",
    "redundancy_reliability",
    "redundancy_time",
    "rollback_failure_free_time",
    "rollback_with_failures",
    "rollforward_reliability",
    "rollforward_time",
]

RATIO_NOTE = "time estimate is a dimensionless ratio (exposure window / mtti), not a plain time"


def _prob_value(p: float | Probability, what: str) -> float:
    v = float(p)
    if math.isnan(v) or not (0.0 <= v <= 1.0):
        raise DomainError(f"{what} must lie in [0, 1], got {v}")
    return v


def _nonneg(v: float, what: str) -> None:
    if math.isnan(v) or v < 0.0:
        raise DomainError(f"{what} must be nonnegative, got {v}")


def _convention_note(convention: Convention) -> str:
    if convention is Convention.SURVIVAL:
        return "survival convention: complement of the literal formula value"
    return "literal convention: reliability formula evaluated as written"


@dataclass(frozen=True)
class ModelOutput:
    """Result of one pattern evaluation.

    ``time_estimate`` is either a plain time or, for the checkpoint-based
    patterns, a dimensionless exposure ratio (``time_kind == "ratio"``).
    ``reliability`` is absent for patterns that do not change reliability.
    ``notes`` collects diagnostics: clamping, convention used, unit caveats.
    """

    time_estimate: float
    reliability: Probability | None = None
    notes: tuple[str, ...] = ()
    time_kind: str = "duration"

    def __post_init__(self) -> None:
        _nonneg(self.time_estimate, "time_estimate")
        if self.time_kind not in ("duration", "ratio"):
            raise DomainError(f"unknown time_kind {self.time_kind!r}")


# ---------------------------------------------------------------------------
# fault diagnosis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiagnosisParams:
    """Monitoring-based fault diagnosis.

    ``observed_params`` system parameters are each inferred at
    ``inference_time`` cost per poll, polled at ``polling_frequency``.
    """

    base_time: float
    observed_params: int
    inference_time: float
    polling_frequency: float

    def __post_init__(self) -> None:
        _nonneg(self.base_time, "base_time")
        if self.observed_params < 1:
            raise DomainError(f"observed_params must be >= 1, got {self.observed_params}")
        _nonneg(self.inference_time, "inference_time")
        if not self.polling_frequency > 0.0:
            raise DomainError(f"polling_frequency must be positive, got {self.polling_frequency}")


def diagnosis_overhead(p: DiagnosisParams) -> ModelOutput:
    """Run time with diagnosis: base_time + observed_params * inference_time / polling_frequency.

    Diagnosis only detects faults, so no reliability value is produced.
    """
    time = p.base_time + p.observed_params * (p.inference_time / p.polling_frequency)
    return ModelOutput(time_estimate=time)


# ---------------------------------------------------------------------------
# reconfiguration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReconfigurationParams:
    """Isolate one failed component out of ``component_count`` and continue degraded.

    Times are normalized to the mission, so ``progress_fraction`` (work done
    before the event) lies in [0, 1]. ``corrected`` selects the degraded-capacity
    factor n/(n-1) for the remaining work instead of the default (n-1)/n.
    ``component_reliabilities`` feeds the any-component-survives reliability.
    """

    progress_fraction: float
    component_count: int
    reconfig_downtime: float
    component_reliabilities: tuple[float, ...] = ()
    corrected: bool = False

    def __post_init__(self) -> None:
        _prob_value(self.progress_fraction, "progress_fraction")
        if self.component_count < 2:
            raise DomainError(f"component_count must be >= 2, got {self.component_count}")
        _nonneg(self.reconfig_downtime, "reconfig_downtime")
        object.__setattr__(
            self,
            "component_reliabilities",
            tuple(_prob_value(r, "component reliability") for r in self.component_reliabilities),
        )


def reconfiguration_performance(p: ReconfigurationParams) -> ModelOutput:
    """Normalized run time after losing one of n components mid-mission.

    Default: progress + (1 - progress) * (n-1)/n + downtime, the factor as
    conventionally written. With ``corrected=True`` the remaining work is
    instead slowed by the lost capacity: (1 - progress) * n/(n-1).
    """
    n = p.component_count
    if p.corrected:
        factor = n / (n - 1)
        note = "corrected degraded-capacity factor n/(n-1) applied to remaining work"
    else:
        factor = (n - 1) / n
        note = "literal degraded factor (n-1)/n applied to remaining work"
    time = p.progress_fraction + (1.0 - p.progress_fraction) * factor + p.reconfig_downtime
    return ModelOutput(time_estimate=time, notes=(note, "normalized time units"))


def reconfiguration_reliability(
    component_reliabilities: Sequence[float | Probability],
    convention: Convention = Convention.LITERAL,
) -> Probability:
    """System survives while any component does: 1 - prod(1 - R_i).

    Components are assumed independent with exponentially distributed
    fault events.
    """
    values = [_prob_value(r, "component reliability") for r in component_reliabilities]
    if not values:
        raise DomainError("component_reliabilities must be nonempty")
    literal = Probability(1.0 - math.prod(1.0 - r for r in values))
    return oriented(literal, convention)


# ---------------------------------------------------------------------------
# rollback and roll-forward recovery
# ---------------------------------------------------------------------------


class CheckpointMode(str, Enum):
    CHECKPOINTING = "checkpointing"
    MESSAGE_LOGGING = "message_logging"


@dataclass(frozen=True)
class CheckpointParams:
    """Checkpoint- or log-based recovery.

    Phases of operation: regular execution (``regular_time``), state capture
    (``checkpoint_cost`` per capture at ``checkpoint_rate``) and recovery
    after an event (``recovery_cost``). In message-logging mode the capture
    cost is derived as message_count * log_time_per_message.
    """

    regular_time: float
    checkpoint_cost: float
    checkpoint_rate: float
    recovery_cost: float
    event_model: EventModel
    mode: CheckpointMode = CheckpointMode.CHECKPOINTING
    message_count: int | None = None
    log_time_per_message: float | None = None

    def __post_init__(self) -> None:
        _nonneg(self.regular_time, "regular_time")
        _nonneg(self.checkpoint_cost, "checkpoint_cost")
        if not self.checkpoint_rate > 0.0:
            raise DomainError(f"checkpoint_rate must be positive, got {self.checkpoint_rate}")
        _nonneg(self.recovery_cost, "recovery_cost")
        if self.mode is CheckpointMode.MESSAGE_LOGGING:
            if self.message_count is None or self.log_time_per_message is None:
                raise DomainError(
                    "message_logging mode requires message_count and log_time_per_message"
                )
            if self.message_count < 0:
                raise DomainError(f"message_count must be >= 0, got {self.message_count}")
            _nonneg(self.log_time_per_message, "log_time_per_message")


def _capture_cost(p: CheckpointParams) -> float:
    """State-capture cost per interval: checkpoint cost, or the logging total."""
    if p.mode is CheckpointMode.MESSAGE_LOGGING:
        return p.message_count * p.log_time_per_message
    return p.checkpoint_cost


def _failure_free_time(p: CheckpointParams) -> float:
    return p.regular_time + _capture_cost(p) / p.checkpoint_rate


def rollback_failure_free_time(p: CheckpointParams) -> ModelOutput:
    """Event-free run time with checkpointing: regular_time + cost / rate."""
    if p.mode is not CheckpointMode.CHECKPOINTING:
        raise DomainError("rollback recovery is defined for checkpointing mode only")
    return ModelOutput(time_estimate=_failure_free_time(p))


def rollback_with_failures(
    p: CheckpointParams, convention: Convention = Convention.LITERAL
) -> ModelOutput:
    """Exposure ratio and reliability of checkpoint/rollback under events.

    With T = failure-free time and g = recovery cost, the run-time estimate
    is the ratio (T + g) / mtti and the literal reliability is
    1 - exp(-(T + g) / mtti).
    """
    if p.mode is not CheckpointMode.CHECKPOINTING:
        raise DomainError("rollback recovery is defined for checkpointing mode only")
    window = _failure_free_time(p) + p.recovery_cost
    ratio = window / p.event_model.mtti
    reliability = oriented(Probability(-math.expm1(-ratio)), convention)
    return ModelOutput(
        time_estimate=ratio,
        reliability=reliability,
        notes=(RATIO_NOTE, _convention_note(convention)),
        time_kind="ratio",
    )


def rollforward_time(
    p: CheckpointParams, convention: Convention = Convention.LITERAL
) -> ModelOutput:
    """Exposure ratio and reliability of roll-forward recovery under events.

    Checkpointing mode is arithmetically identical to rollback. In
    message-logging mode the per-interval capture cost becomes
    message_count * log_time_per_message, and the reliability exponent uses
    that logging total in place of the recovery cost.
    """
    window = _failure_free_time(p) + p.recovery_cost
    ratio = window / p.event_model.mtti
    reliability = rollforward_reliability(p, convention)
    return ModelOutput(
        time_estimate=ratio,
        reliability=reliability,
        notes=(RATIO_NOTE, _convention_note(convention)),
        time_kind="ratio",
    )


def rollforward_reliability(
    p: CheckpointParams, convention: Convention = Convention.LITERAL
) -> Probability:
    """Literal roll-forward reliability: 1 - exp(-(T + extra) / mtti).

    ``extra`` is the logging total (message_count * log_time_per_message) in
    message-logging mode and the recovery cost in checkpointing mode.
    """
    if p.mode is CheckpointMode.MESSAGE_LOGGING:
        extra = p.message_count * p.log_time_per_message
    else:
        extra = p.recovery_cost
    exponent = (_failure_free_time(p) + extra) / p.event_model.mtti
    return oriented(Probability(-math.expm1(-exponent)), convention)


# ---------------------------------------------------------------------------
# redundancy
# ---------------------------------------------------------------------------


class RedundancyMode(str, Enum):
    SPACE = "space"
    TIME = "time"


@dataclass(frozen=True)
class RedundancyParams:
    """Replicate a fraction of the work ``degree`` ways, then majority-vote.

    Space redundancy runs replicas concurrently (no serial slowdown of the
    replicated fraction); time redundancy repeats it ``degree`` times.
    """

    serial_time: float
    replicated_fraction: float
    degree: int
    mode: RedundancyMode = RedundancyMode.SPACE
    voting_time: float = 0.0
    replica_mtti: float = 1.0

    def __post_init__(self) -> None:
        if not self.serial_time > 0.0:
            raise DomainError(f"serial_time must be positive, got {self.serial_time}")
        _prob_value(self.replicated_fraction, "replicated_fraction")
        if self.degree < 1:
            raise DomainError(f"degree must be >= 1, got {self.degree}")
        _nonneg(self.voting_time, "voting_time")
        if not self.replica_mtti > 0.0:
            raise DomainError(f"replica_mtti must be positive, got {self.replica_mtti}")


def redundancy_time(p: RedundancyParams) -> ModelOutput:
    """Run time with replication: T * ((1 - a) + b * a) + voting_time.

    ``a`` is the replicated fraction; the slowdown b is 1 for space
    redundancy and equals the degree for time redundancy.
    """
    slowdown = 1.0 if p.mode is RedundancyMode.SPACE else float(p.degree)
    time = p.serial_time * ((1.0 - p.replicated_fraction) + slowdown * p.replicated_fraction)
    return ModelOutput(time_estimate=time + p.voting_time)


def redundancy_reliability(
    t: float, p: RedundancyParams, convention: Convention = Convention.LITERAL
) -> Probability:
    """Literal replicated-system reliability: 1 - (t / replica_mtti) ** degree.

    The expression is only meaningful for t <= replica_mtti; beyond that the
    raw value leaves [0, 1] and is clamped (flagged on the result) so that
    parameter sweeps never abort.
    """
    if math.isnan(t) or t < 0.0:
        raise DomainError(f"time must be nonnegative, got {t}")
    raw = 1.0 - (t / p.replica_mtti) ** p.degree
    return oriented(Probability.clamp(raw), convention)


# ---------------------------------------------------------------------------
# n-version design diversity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NVersionParams:
    """Independently implemented versions of one function plus a majority voter.

    ``version_success_probs`` are per-version success probabilities, assumed
    independent (distinct teams rarely make identical mistakes), from which
    the exactly-one-version-correct masses are derived. ``voter_failure_prob``
    is the chance the voter cannot pick the right answer from at least two
    correct versions.
    """

    version_success_probs: tuple[float, ...]
    voter_failure_prob: float
    event_model: EventModel

    def __post_init__(self) -> None:
        probs = tuple(_prob_value(v, "version success probability") for v in self.version_success_probs)
        if len(probs) < 2:
            raise DomainError(f"need at least 2 versions, got {len(probs)}")
        object.__setattr__(self, "version_success_probs", probs)
        _prob_value(self.voter_failure_prob, "voter_failure_prob")


def nversion_exclusive_success(
    probs: Sequence[float | Probability],
) -> tuple[tuple[Probability, ...], Probability]:
    """Per-version probability that only that version succeeds, plus their sum.

    For version k: p_k * prod_{j != k} (1 - p_j), under independence. Callers
    holding externally measured exclusive-success masses can skip this and
    feed them to ``nversion_failure_density`` directly.
    """
    values = [_prob_value(v, "version success probability") for v in probs]
    if len(values) < 2:
        raise DomainError(f"need at least 2 versions, got {len(values)}")
    per_version = []
    for k, pk in enumerate(values):
        mass = pk * math.prod(1.0 - pj for j, pj in enumerate(values) if j != k)
        per_version.append(Probability(mass))
    total = Probability.clamp(math.fsum(p.value for p in per_version))
    return tuple(per_version), total


def nversion_failure_density(
    exclusive_sum: float | Probability, voter_fail: float | Probability
) -> Probability:
    """Failure mass of the voted ensemble: (1 - v) * s + v.

    ``s`` is the total exactly-one-version-correct mass and ``v`` the voter
    failure probability; the result is analytically within [0, 1].
    """
    s = _prob_value(exclusive_sum, "exclusive_sum")
    v = _prob_value(voter_fail, "voter_fail")
    return Probability.clamp((1.0 - v) * s + v)


def nversion_reliability(
    t: float, p: NVersionParams, convention: Convention = Convention.LITERAL
) -> Probability:
    """Literal n-version reliability at time t: 1 - Q * exp(-t/mtti).

    Q is the ensemble failure density. Note the weighting factor
    exp(-t/mtti) decreases with t, the opposite orientation of the base
    interrupt model; the literal form keeps it as written and this quirk is
    surfaced as a note at composition level.
    """
    if math.isnan(t) or t < 0.0:
        raise DomainError(f"time must be nonnegative, got {t}")
    _, total = nversion_exclusive_success(p.version_success_probs)
    q = nversion_failure_density(total, p.voter_failure_prob)
    literal = Probability.clamp(1.0 - q.value * math.exp(-t / p.event_model.mtti))
    return oriented(literal, convention)


NVERSION_WEIGHT_NOTE = (
    "n-version weighting factor exp(-t/mtti) is survival-shaped, opposite in "
    "orientation to the base interrupt model; literal form kept as written"
)
