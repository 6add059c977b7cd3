"""Exception types shared across the package."""

from __future__ import annotations


class StructureError(ValueError):
    """Base class for malformed input."""


class SignatureError(StructureError):
    """Unknown symbol, arity mismatch or incompatible signatures."""


class DomainError(StructureError):
    """A tuple entry or index lies outside the domain."""


class RepresentationError(StructureError):
    """Input cannot be represented in the requested form (e.g. not a C-relation)."""


class ClassError(StructureError):
    """A structure does not belong to the class it was supplied for."""


class BudgetExceeded(RuntimeError):
    """The requested search exceeds its budget.

    ``required`` is the size of the search space (or node count) that would be
    needed, ``budget`` is the limit in force.
    """

    def __init__(self, message: str, required: int | None = None, budget: int | None = None):
        super().__init__(message)
        self.required = required
        self.budget = budget


class InvariantError(AssertionError):
    """An internal construction produced an object violating its contract."""
