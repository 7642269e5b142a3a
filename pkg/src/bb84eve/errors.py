"""Exception hierarchy shared by the library and the CLI."""


class AttackError(Exception):
    """Base class for all errors raised by bb84eve."""


class DomainError(AttackError, ValueError):
    """An argument lies outside the domain of the operation."""


class InfeasibleError(AttackError):
    """The requested attack cannot be realized by any set of probe states."""


class OptimizationError(AttackError):
    """No feasible point was found by the search."""


class ConsistencyError(AttackError):
    """An internal numerical check (orthonormality, normalization) failed."""
