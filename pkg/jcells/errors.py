"""Exceptions the CLI tells apart from plain input errors."""


class UnclassifiedCaseError(ValueError):
    """An action outside the cases with a known idempotent recipe."""


class InconsistentSystemError(ArithmeticError):
    """A linear system built from constraints has no solution."""


class StructureCheckError(AssertionError):
    """A computed object failed one of its defining checks."""
