"""Resilience pattern modeling toolkit.

Closed-form reliability/performance models for HPC resilience design
patterns, a seeded Monte Carlo fault-injection simulator to validate them,
series composition of pattern solutions, and a batch front end (HTTP service
plus CLI) for evaluations, simulations, sweeps and comparisons.
"""

__version__ = "0.1.0"

from .composition import (
    Component,
    EvaluationReport,
    FixedReliability,
    SystemModel,
    evaluate_system,
    series_reliability,
    total_overhead,
)
from .errors import ConfigError, DomainError, MappingError
from .events import (
    Convention,
    EventModel,
    Probability,
    interrupt_probability,
    sample_interarrival,
    survival_probability,
)
from .patterns import (
    CheckpointMode,
    CheckpointParams,
    DiagnosisParams,
    ModelOutput,
    NVersionParams,
    ReconfigurationParams,
    RedundancyMode,
    RedundancyParams,
    diagnosis_overhead,
    nversion_exclusive_success,
    nversion_failure_density,
    nversion_reliability,
    reconfiguration_performance,
    reconfiguration_reliability,
    redundancy_reliability,
    redundancy_time,
    rollback_failure_free_time,
    rollback_with_failures,
    rollforward_reliability,
    rollforward_time,
)
from .simulator import (
    CheckpointPolicy,
    EnsembleStats,
    MttiScope,
    NoProtection,
    ReconfigurationPolicy,
    ReplicationMode,
    ReplicationPolicy,
    SimScenario,
    TrialOutcome,
    derive_trial_seed,
    empirical_reliability,
    run_ensemble,
    run_trial,
)

__all__ = [
    "__version__",
    "CheckpointMode",
    "CheckpointParams",
    "CheckpointPolicy",
    "Component",
    "ConfigError",
    "Convention",
    "DiagnosisParams",
    "DomainError",
    "EnsembleStats",
    "EvaluationReport",
    "EventModel",
    "FixedReliability",
    "MappingError",
    "ModelOutput",
    "MttiScope",
    "NVersionParams",
    "NoProtection",
    "Probability",
    "ReconfigurationParams",
    "ReconfigurationPolicy",
    "RedundancyMode",
    "RedundancyParams",
    "ReplicationMode",
    "ReplicationPolicy",
    "SimScenario",
    "SystemModel",
    "TrialOutcome",
    "derive_trial_seed",
    "diagnosis_overhead",
    "empirical_reliability",
    "evaluate_system",
    "interrupt_probability",
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
    "run_ensemble",
    "run_trial",
    "sample_interarrival",
    "series_reliability",
    "survival_probability",
    "total_overhead",
]
