"""Exception types shared across the toolkit."""

from __future__ import annotations


class DomainError(ValueError):
    """A value violates an operation's stated preconditions."""


class MappingError(DomainError):
    """System and scenario sections of a comparison do not refer to the same setup."""


class ConfigError(ValueError):
    """Config document failed validation.

    Carries every validation failure, each as a (field path, message) pair,
    so callers can report all problems at once.
    """

    def __init__(self, errors: list[tuple[str, str]]):
        self.errors = list(errors)
        lines = [f"{path}: {message}" for path, message in self.errors]
        super().__init__("invalid config document:\n  " + "\n  ".join(lines))
