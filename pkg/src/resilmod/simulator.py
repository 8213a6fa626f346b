"""Seeded Monte Carlo fault-injection simulator for a notional multi-node system.

The simulator is deliberately independent of the closed-form pattern models:
it implements fully specified operational semantics so that any divergence
between analytic and empirical numbers is attributable to the formulas, not
to ambiguity in the oracle.

Operational semantics
---------------------
Work advances at unit rate in simulated time. Faults arrive as a Poisson
process; ``mtti_scope`` selects whether ``fault_mtti`` is the mean time to
interrupt of the whole system (``per_system``) or of each node/replica/
component (``per_node``, aggregate rate scales with the live count). A trial
ends at completion, at the deadline, or at ``max_sim_time``, whichever comes
first.

Per policy:

* none: the first fault is terminal; all progress is lost.
* checkpoint(interval, cost, recovery): state is saved after every
  ``interval`` of completed work at ``cost`` wall time, except that no
  checkpoint follows the final work segment (it would protect nothing).
  A fault discards progress since the last committed checkpoint and starts a
  ``recovery`` period before work resumes. Faults during a checkpoint write
  or during recovery are permitted; an interrupted write is discarded and an
  interrupted recovery restarts from scratch. Wasted work accumulates lost
  progress, lost partial writes, and all recovery time.
* replication space(degree d, threshold k): d replicas run the work
  concurrently; a replica hit by a fault is dead for the rest of the trial.
  The trial fails terminally at the moment fewer than k replicas survive
  before the work completes. Completion pays ``voting_cost`` at the end.
* replication time(degree d, threshold k): the work is executed d times
  sequentially (work is multiplied by d); an execution during which any
  fault arrives is corrupted and its full duration counts as wasted. After
  all d executions the vote at d*work + voting_cost succeeds if at least k
  executions were fault-free and fails terminally otherwise.
* reconfiguration(components n, downtime, min_components): a fault removes
  one component, the system pays ``downtime`` (restarted if another fault
  lands during it), and throughput is rescaled to live/total. The trial
  fails terminally when fewer than ``min_components`` remain. Downtime
  counts as wasted work; progress is never rolled back.

Determinism
-----------
(scenario, master_seed, trials) fully determine every output bit. Each trial
owns a PCG64 generator seeded with ``derive_trial_seed(master_seed, index)``,
a SplitMix64 finalizer over master_seed + GOLDEN * (index + 1). Trials are
therefore independent of execution order, and ensemble statistics are always
reduced in trial-index order, so serial and parallel runs agree exactly.
"""

from __future__ import annotations

import math
import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from .errors import DomainError
from .events import Probability, exponential_sample

__all__ = [
    "CheckpointPolicy",
    "EnsembleStats",
    "MttiScope",
    "NoProtection",
    "Policy",
    "ReconfigurationPolicy",
    "ReplicationMode",
    "ReplicationPolicy",
    "SimScenario",
    "TrialOutcome",
    "derive_trial_seed",
    "empirical_reliability",
    "resolve_workers",
    "run_ensemble",
    "run_trial",
]

MAX_WORKERS_ENV = "RESILMOD_MAX_WORKERS"

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def derive_trial_seed(master_seed: int, index: int) -> int:
    """Deterministic per-trial seed: SplitMix64 finalizer of (master_seed, index)."""
    x = (master_seed + _GOLDEN * (index + 1)) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


class MttiScope(str, Enum):
    PER_SYSTEM = "per_system"
    PER_NODE = "per_node"


class ReplicationMode(str, Enum):
    SPACE = "space"
    TIME = "time"


@dataclass(frozen=True)
class NoProtection:
    """No resilience policy: the first fault kills the trial."""


@dataclass(frozen=True)
class CheckpointPolicy:
    interval: float
    cost: float = 0.0
    recovery: float = 0.0

    def __post_init__(self) -> None:
        if not self.interval > 0.0:
            raise DomainError(f"checkpoint interval must be positive, got {self.interval}")
        if self.cost < 0.0 or math.isnan(self.cost):
            raise DomainError(f"checkpoint cost must be nonnegative, got {self.cost}")
        if self.recovery < 0.0 or math.isnan(self.recovery):
            raise DomainError(f"recovery cost must be nonnegative, got {self.recovery}")


@dataclass(frozen=True)
class ReplicationPolicy:
    degree: int
    mode: ReplicationMode = ReplicationMode.SPACE
    survival_threshold: int = 1
    voting_cost: float = 0.0

    def __post_init__(self) -> None:
        if self.degree < 1:
            raise DomainError(f"replication degree must be >= 1, got {self.degree}")
        if not (1 <= self.survival_threshold <= self.degree):
            raise DomainError(
                f"survival_threshold must be in [1, degree], got {self.survival_threshold}"
            )
        if self.voting_cost < 0.0 or math.isnan(self.voting_cost):
            raise DomainError(f"voting_cost must be nonnegative, got {self.voting_cost}")


@dataclass(frozen=True)
class ReconfigurationPolicy:
    components: int
    downtime: float = 0.0
    min_components: int = 1

    def __post_init__(self) -> None:
        if self.components < 1:
            raise DomainError(f"components must be >= 1, got {self.components}")
        if self.downtime < 0.0 or math.isnan(self.downtime):
            raise DomainError(f"downtime must be nonnegative, got {self.downtime}")
        if not (1 <= self.min_components <= self.components):
            raise DomainError(
                f"min_components must be in [1, components], got {self.min_components}"
            )


Policy = Union[NoProtection, CheckpointPolicy, ReplicationPolicy, ReconfigurationPolicy]


@dataclass(frozen=True)
class SimScenario:
    """Executable description of one simulated workload."""

    work: float
    fault_mtti: float
    node_count: int = 1
    mtti_scope: MttiScope = MttiScope.PER_SYSTEM
    policy: Policy = NoProtection()
    deadline: float | None = None
    max_sim_time: float = 1e9

    def __post_init__(self) -> None:
        if not self.work > 0.0:
            raise DomainError(f"work must be positive, got {self.work}")
        if not self.fault_mtti > 0.0:
            raise DomainError(f"fault_mtti must be positive, got {self.fault_mtti}")
        if self.node_count < 1:
            raise DomainError(f"node_count must be >= 1, got {self.node_count}")
        if self.deadline is not None and not self.deadline > 0.0:
            raise DomainError(f"deadline must be positive, got {self.deadline}")
        if not self.max_sim_time > 0.0:
            raise DomainError(f"max_sim_time must be positive, got {self.max_sim_time}")

    @property
    def time_limit(self) -> float:
        if self.deadline is None:
            return self.max_sim_time
        return min(self.deadline, self.max_sim_time)

    def system_mtti(self) -> float:
        """Aggregate mean time to interrupt seen by a single work stream."""
        if self.mtti_scope is MttiScope.PER_NODE:
            return self.fault_mtti / self.node_count
        return self.fault_mtti


@dataclass(frozen=True)
class TrialOutcome:
    """Result of one simulated trial.

    ``failure_time`` is the instant of a terminal failure event, None for
    completed trials and for trials cut off by the deadline or the time cap.
    ``wasted_work`` is time recomputed or lost: discarded progress, recovery
    and reconfiguration downtime, corrupted replica executions.
    """

    completed: bool
    completion_time: float | None
    events: int
    wasted_work: float
    failure_time: float | None = None


def _trace(trace: list | None, time: float, kind: str, **detail) -> None:
    if trace is not None:
        trace.append({"time": time, "kind": kind, "detail": detail})


def run_trial(scenario: SimScenario, seed: int, trace: list | None = None) -> TrialOutcome:
    """Run one trial, deterministic given (scenario, seed).

    ``trace`` (a list, when given) receives one dict per simulation event:
    keys ``time``, ``kind`` and ``detail``.
    """
    rng = np.random.default_rng(seed)
    policy = scenario.policy
    if isinstance(policy, NoProtection):
        return _run_unprotected(scenario, rng, trace)
    if isinstance(policy, CheckpointPolicy):
        return _run_checkpoint(scenario, policy, rng, trace)
    if isinstance(policy, ReplicationPolicy):
        if policy.mode is ReplicationMode.SPACE:
            return _run_replication_space(scenario, policy, rng, trace)
        return _run_replication_time(scenario, policy, rng, trace)
    if isinstance(policy, ReconfigurationPolicy):
        return _run_reconfiguration(scenario, policy, rng, trace)
    raise DomainError(f"unknown policy type {type(policy).__name__}")


def _run_unprotected(scenario, rng, trace) -> TrialOutcome:
    limit = scenario.time_limit
    fault = exponential_sample(rng, scenario.system_mtti())
    if fault < scenario.work and fault <= limit:
        _trace(trace, fault, "fault", terminal=True)
        return TrialOutcome(False, None, events=1, wasted_work=fault, failure_time=fault)
    if scenario.work <= limit:
        _trace(trace, scenario.work, "complete")
        return TrialOutcome(True, scenario.work, events=0, wasted_work=0.0)
    _trace(trace, limit, "cutoff")
    return TrialOutcome(False, None, events=0, wasted_work=0.0)


def _run_checkpoint(scenario, policy, rng, trace) -> TrialOutcome:
    work = scenario.work
    tau = policy.interval
    delta = policy.cost
    gamma = policy.recovery
    mtti = scenario.system_mtti()
    limit = scenario.time_limit

    t = 0.0       # wall clock
    prog = 0.0    # work completed since trial start, rolled back on faults
    ckpt = 0.0    # progress at the last committed checkpoint
    events = 0
    wasted = 0.0
    next_fault = exponential_sample(rng, mtti)

    while True:
        # Writes still ahead: one per full interval boundary strictly inside
        # (ckpt, work); the final segment is never followed by a write.
        writes_left = max(0, math.ceil((work - ckpt) / tau) - 1)
        done_at = t + (work - prog) + delta * writes_left
        if next_fault >= done_at or next_fault > limit:
            if done_at <= limit:
                _trace(trace, done_at, "complete")
                return TrialOutcome(True, done_at, events, wasted)
            _trace(trace, limit, "cutoff")
            return TrialOutcome(False, None, events, wasted)

        # A fault lands before completion; walk work/write phases up to it.
        fault_hit = False
        while True:
            boundary = min(ckpt + tau, work)
            if prog < boundary:
                chunk_end = t + (boundary - prog)
                if next_fault < chunk_end:
                    prog += next_fault - t
                    t = next_fault
                    fault_hit = True
                    break
                t = chunk_end
                prog = boundary
            if boundary >= work:
                break  # reached completion a rounding step before done_at
            if next_fault < t + delta:
                wasted += next_fault - t  # partial write is lost wall time
                t = next_fault
                fault_hit = True
                break
            t += delta
            ckpt = prog
            _trace(trace, t, "checkpoint", progress=prog)
        if not fault_hit:
            if t <= limit:
                _trace(trace, t, "complete")
                return TrialOutcome(True, t, events, wasted)
            _trace(trace, limit, "cutoff")
            return TrialOutcome(False, None, events, wasted)

        # Fault at time t: roll back to the last committed checkpoint.
        events += 1
        lost = prog - ckpt
        wasted += lost
        _trace(trace, t, "fault", lost_progress=lost)
        prog = ckpt
        next_fault = t + exponential_sample(rng, mtti)

        # Recovery; a fault during recovery restarts it from scratch.
        while next_fault < t + gamma and next_fault <= limit:
            wasted += next_fault - t
            events += 1
            t = next_fault
            _trace(trace, t, "fault", during="recovery")
            next_fault = t + exponential_sample(rng, mtti)
        if t + gamma > limit:
            wasted += limit - t
            _trace(trace, limit, "cutoff")
            return TrialOutcome(False, None, events, wasted)
        t += gamma
        wasted += gamma
        _trace(trace, t, "recovery", cost=gamma)


def _run_replication_space(scenario, policy, rng, trace) -> TrialOutcome:
    d = policy.degree
    k = policy.survival_threshold
    work = scenario.work
    limit = scenario.time_limit

    if scenario.mtti_scope is MttiScope.PER_NODE:
        # Replicas fail independently and stay dead; one draw per replica.
        deaths = sorted(exponential_sample(rng, scenario.fault_mtti) for _ in range(d))
        fail_at = deaths[d - k]  # instant the live count drops below k
        if fail_at < work and fail_at <= limit:
            events = sum(1 for s in deaths if s <= fail_at)
            _trace(trace, fail_at, "failure", survivors=k - 1)
            return TrialOutcome(False, None, events, wasted_work=fail_at, failure_time=fail_at)
        horizon = min(work, limit)
        events = sum(1 for s in deaths if s < horizon)
    else:
        # One system-wide fault stream; each fault kills one live replica.
        t = 0.0
        alive = d
        events = 0
        while True:
            t_next = t + exponential_sample(rng, scenario.fault_mtti)
            if t_next >= work or t_next > limit:
                break
            t = t_next
            events += 1
            if alive > 1:
                rng.integers(alive)  # victim identity; drawn for stream stability
            alive -= 1
            _trace(trace, t, "replica_death", alive=alive)
            if alive < k:
                return TrialOutcome(False, None, events, wasted_work=t, failure_time=t)

    done_at = work + policy.voting_cost
    if done_at <= limit:
        _trace(trace, done_at, "complete", events=events)
        return TrialOutcome(True, done_at, events, wasted_work=0.0)
    _trace(trace, limit, "cutoff")
    return TrialOutcome(False, None, events, wasted_work=0.0)


def _run_replication_time(scenario, policy, rng, trace) -> TrialOutcome:
    d = policy.degree
    k = policy.survival_threshold
    work = scenario.work
    total = d * work
    limit = scenario.time_limit
    mtti = scenario.system_mtti()

    events = 0
    corrupted: set[int] = set()
    t = 0.0
    while True:
        t += exponential_sample(rng, mtti)
        if t >= total or t > limit:
            break
        events += 1
        run_index = min(int(t // work), d - 1)
        corrupted.add(run_index)
        _trace(trace, t, "fault", corrupted_run=run_index)

    done_at = total + policy.voting_cost
    wasted = len(corrupted) * work
    if done_at > limit:
        _trace(trace, limit, "cutoff")
        return TrialOutcome(False, None, events, wasted)
    clean = d - len(corrupted)
    if clean >= k:
        _trace(trace, done_at, "complete", clean_runs=clean)
        return TrialOutcome(True, done_at, events, wasted)
    _trace(trace, done_at, "failure", clean_runs=clean)
    return TrialOutcome(False, None, events, wasted, failure_time=done_at)


def _run_reconfiguration(scenario, policy, rng, trace) -> TrialOutcome:
    work = scenario.work
    limit = scenario.time_limit
    total = policy.components
    alive = total
    per_node = scenario.mtti_scope is MttiScope.PER_NODE

    t = 0.0
    prog = 0.0
    throughput = 1.0
    events = 0
    wasted = 0.0

    def stretch_mtti() -> float:
        return scenario.fault_mtti / alive if per_node else scenario.fault_mtti

    while True:
        next_fault = t + exponential_sample(rng, stretch_mtti())
        done_at = t + (work - prog) / throughput
        if done_at <= next_fault and done_at <= limit:
            _trace(trace, done_at, "complete", alive=alive)
            return TrialOutcome(True, done_at, events, wasted)
        if next_fault > limit:
            _trace(trace, limit, "cutoff")
            return TrialOutcome(False, None, events, wasted)

        prog += throughput * (next_fault - t)
        t = next_fault
        events += 1
        alive -= 1
        _trace(trace, t, "fault", alive=alive)
        if alive < policy.min_components:
            return TrialOutcome(False, None, events, wasted, failure_time=t)

        # Reconfiguration downtime; further faults restart it and may fail the trial.
        while True:
            next_fault = t + exponential_sample(rng, stretch_mtti())
            if next_fault < t + policy.downtime and next_fault <= limit:
                wasted += next_fault - t
                t = next_fault
                events += 1
                alive -= 1
                _trace(trace, t, "fault", during="reconfiguration", alive=alive)
                if alive < policy.min_components:
                    return TrialOutcome(False, None, events, wasted, failure_time=t)
                continue
            if t + policy.downtime > limit:
                wasted += limit - t
                _trace(trace, limit, "cutoff")
                return TrialOutcome(False, None, events, wasted)
            t += policy.downtime
            wasted += policy.downtime
            throughput = alive / total
            _trace(trace, t, "reconfigure", alive=alive, throughput=throughput)
            break


# ---------------------------------------------------------------------------
# ensembles
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EnsembleStats:
    """Order-independent aggregate of an ensemble of trials.

    ``completion_times`` and ``failure_times`` are sorted arrays backing the
    empirical curves. ``traces`` is populated only when traces were requested,
    one tuple of event records per trial, in trial order.
    """

    trials: int
    master_seed: int
    completed: int
    mean_time: float | None
    stderr_time: float | None
    total_events: int
    total_wasted_work: float
    completion_times: np.ndarray
    failure_times: np.ndarray
    traces: tuple | None = None

    @property
    def completion_fraction(self) -> float:
        return self.completed / self.trials

    def completion_fraction_by(self, t: float) -> float:
        """Fraction of trials completed by time t (nondecreasing in t)."""
        if t < 0.0 or math.isnan(t):
            raise DomainError(f"time must be nonnegative, got {t}")
        return float(np.searchsorted(self.completion_times, t, side="right")) / self.trials

    def reliability_by(self, t: float) -> float:
        """Fraction of trials with no terminal failure by time t."""
        if t < 0.0 or math.isnan(t):
            raise DomainError(f"time must be nonnegative, got {t}")
        failed = float(np.searchsorted(self.failure_times, t, side="right"))
        return 1.0 - failed / self.trials


def empirical_reliability(stats: EnsembleStats, t: float) -> Probability:
    """Empirical counterpart of a reliability value at time t.

    Step interpolation on the recorded terminal-failure curve: the fraction
    of trials that had not failed terminally by t.
    """
    return Probability(stats.reliability_by(t))


def resolve_workers(requested: int | None = None) -> int:
    """Worker count: requested or CPU count, capped by RESILMOD_MAX_WORKERS."""
    cap_raw = os.environ.get(MAX_WORKERS_ENV)
    cap = None
    if cap_raw:
        try:
            cap = max(1, int(cap_raw))
        except ValueError:
            raise DomainError(f"{MAX_WORKERS_ENV} must be an integer, got {cap_raw!r}")
    workers = requested if requested is not None else (os.cpu_count() or 1)
    workers = max(1, workers)
    if cap is not None:
        workers = min(workers, cap)
    return workers


def _run_chunk(args) -> list:
    scenario, master_seed, start, stop, with_traces = args
    out = []
    for index in range(start, stop):
        trace: list | None = [] if with_traces else None
        outcome = run_trial(scenario, derive_trial_seed(master_seed, index), trace)
        out.append((outcome, tuple(trace) if with_traces else None))
    return out


def run_ensemble(
    scenario: SimScenario,
    trials: int,
    master_seed: int,
    max_workers: int | None = None,
    collect_traces: bool = False,
) -> EnsembleStats:
    """Run ``trials`` independent trials and aggregate deterministically.

    Per-trial seeds derive from (master_seed, index); aggregation is done in
    trial-index order, so results are bit-identical for any worker count.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    if not (0 <= master_seed <= _MASK64):
        raise DomainError(f"master_seed must be an unsigned 64-bit integer, got {master_seed}")

    workers = min(resolve_workers(max_workers), trials)
    if workers <= 1:
        results = _run_chunk((scenario, master_seed, 0, trials, collect_traces))
    else:
        per = math.ceil(trials / workers)
        chunks = [
            (scenario, master_seed, lo, min(lo + per, trials), collect_traces)
            for lo in range(0, trials, per)
        ]
        ctx = multiprocessing.get_context("fork" if "fork" in multiprocessing.get_all_start_methods() else "spawn")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            results = []
            for part in pool.map(_run_chunk, chunks):
                results.extend(part)

    outcomes = [r[0] for r in results]
    completion = np.array(
        [o.completion_time for o in outcomes if o.completed], dtype=np.float64
    )
    failures = np.array(
        [o.failure_time for o in outcomes if o.failure_time is not None], dtype=np.float64
    )
    completed = int(completion.size)
    mean_time = float(completion.mean()) if completed else None
    if completed >= 2:
        stderr = float(completion.std(ddof=1) / math.sqrt(completed))
    else:
        stderr = None
    return EnsembleStats(
        trials=trials,
        master_seed=master_seed,
        completed=completed,
        mean_time=mean_time,
        stderr_time=stderr,
        total_events=sum(o.events for o in outcomes),
        total_wasted_work=math.fsum(o.wasted_work for o in outcomes),
        completion_times=np.sort(completion),
        failure_times=np.sort(failures),
        traces=tuple(r[1] for r in results) if collect_traces else None,
    )
