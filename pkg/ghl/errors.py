"""Exception hierarchy shared by the engine and the command line."""
from typing import Any, Optional


class GhlError(Exception):
    """Base class for every error raised by the engine."""

    exit_code = 1

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.message = message
        self.witness = witness

    def to_dict(self) -> dict:
        """Serialize for the command line error stream."""
        return {
            "error": type(self).__name__,
            "message": self.message,
            "witness": _jsonable(self.witness),
        }


class UsageError(GhlError):
    """Invalid user input: specifiers, degree ranges, tables."""

    exit_code = 2


class GroupAxiomError(UsageError):
    """A multiplication table that does not define a group."""


class DegreeRangeError(UsageError):
    """Requested degree outside the range an operation is defined on."""


class StructuralError(GhlError):
    """An internal invariant failed; the witness pins down where."""


class LatticeContainmentError(StructuralError):
    """A lattice was expected to contain a vector that it does not."""


class WellDefinednessError(StructuralError):
    """A matrix does not descend to the presented quotient groups."""


class BudgetExceededError(GhlError):
    """A degree would need more generators than the configured budget."""

    def __init__(self, what: str, requested: int, budget: int):
        super().__init__(
            f"{what} needs {requested} generators, budget is {budget}",
            witness={"requested": requested, "budget": budget},
        )
        self.requested = requested
        self.budget = budget


class VerificationFailure(GhlError):
    """One or more verification checks did not match."""


def _jsonable(value: Any) -> Any:
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, int):
        return str(value) if abs(value) >= 2**53 else value
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in value]
    return str(value)
