"""Exponential interrupt process shared by the analytic models and the simulator.

Fault/error/failure arrivals are modeled as a Poisson process whose
interarrival times are exponential with mean ``mtti`` (mean time to
interrupt). Two complementary readings of the same process are exposed
because the pattern-level reliability formulas this library reproduces are
not consistent about which one they mean:

* ``interrupt_probability``: 1 - exp(-t/mtti), probability that at least one
  interrupt arrives within time t. This is the *literal* reading and the
  library default.
* ``survival_probability``: exp(-t/mtti), the standard survival function.

``Convention`` selects the reading for every pattern-level reliability
result: ``LITERAL`` evaluates each formula exactly as written, ``SURVIVAL``
returns the complement of the literal value. The convention is always passed
explicitly; nothing here is global mutable state, so all operations are pure
and safe to call concurrently. Random streams are the only stateful objects
and must not be shared across threads.

Time and rate units are caller-defined. They must be uniform within one
evaluation; no unit conversion is performed anywhere in the library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError

__all__ = [
    "Convention",
    "EventModel",
    "Probability",
    "exponential_sample",
    "interrupt_probability",
    "oriented",
    "sample_interarrival",
    "survival_probability",
]


class Convention(str, Enum):
    """How pattern reliability formulas are read.

    LITERAL evaluates each reliability expression as written; SURVIVAL
    substitutes the complement of the literal value.
    """

    LITERAL = "literal"
    SURVIVAL = "survival"


@dataclass(frozen=True)
class Probability:
    """A probability in [0, 1] plus a flag recording whether it was clamped.

    ``clamped`` is True exactly when the raw formula value fell outside
    [0, 1] and was pulled back to the nearest bound.
    """

    value: float
    clamped: bool = False

    def __post_init__(self) -> None:
        if not (0.0 <= self.value <= 1.0):
            raise DomainError(f"probability must lie in [0, 1], got {self.value}")

    def __float__(self) -> float:
        return self.value

    def complement(self) -> "Probability":
        return Probability(1.0 - self.value, self.clamped)

    @classmethod
    def clamp(cls, raw: float) -> "Probability":
        """Build a Probability from a raw value, clamping into [0, 1] if needed."""
        if math.isnan(raw):
            raise DomainError("probability is NaN")
        if raw < 0.0:
            return cls(0.0, clamped=True)
        if raw > 1.0:
            return cls(1.0, clamped=True)
        return cls(raw)


def oriented(literal: Probability, convention: Convention) -> Probability:
    """Return the literal probability or its complement per the convention."""
    if convention is Convention.SURVIVAL:
        return literal.complement()
    return literal


@dataclass(frozen=True)
class EventModel:
    """Poisson interrupt process with mean time to interrupt ``mtti``."""

    mtti: float
    description: str | None = None

    def __post_init__(self) -> None:
        if not (self.mtti > 0.0 and math.isfinite(self.mtti)):
            raise DomainError(f"mtti must be positive and finite, got {self.mtti}")


def _check_time(t: float) -> None:
    if math.isnan(t) or t < 0.0:
        raise DomainError(f"time must be nonnegative, got {t}")


def interrupt_probability(t: float, model: EventModel) -> Probability:
    """Probability of at least one interrupt within t: 1 - exp(-t/mtti)."""
    _check_time(t)
    return Probability(-math.expm1(-t / model.mtti))


def survival_probability(t: float, model: EventModel) -> Probability:
    """Probability of zero interrupts within t: exp(-t/mtti)."""
    _check_time(t)
    return Probability(math.exp(-t / model.mtti))


def exponential_sample(rng: np.random.Generator, mean: float) -> float:
    """One exponential draw with the given mean, strictly positive.

    Inverse-CDF sampling: -mean * ln(u) with u uniform on (0, 1). A zero
    draw from the generator is rejected and redrawn, so the result is
    always > 0.
    """
    u = rng.random()
    while u <= 0.0:
        u = rng.random()
    return -mean * math.log(u)


def sample_interarrival(rng: np.random.Generator, model: EventModel) -> float:
    """Sample one interrupt interarrival time from the model's process.

    Successive calls on the same generator are independent draws. The
    generator is owned by the caller; concurrent use requires independent
    streams.
    """
    return exponential_sample(rng, model.mtti)
