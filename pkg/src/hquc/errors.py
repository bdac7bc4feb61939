"""Exception hierarchy for the solver package."""


class SolverError(Exception):
    """Base class for all errors raised by this package."""


class MalformedRow(SolverError):
    """A CSV row could not be parsed (wrong column count or a bad number)."""


class DuplicateId(SolverError):
    """Two generator rows share the same unit id."""


class InvariantViolation(SolverError):
    """Input data violates a structural invariant (bounds, ids, signs)."""


class LengthMismatch(SolverError):
    """Sequences that must share the instance length do not."""


class InfeasibleCommitment(SolverError):
    """The load cannot be served by the committed units."""


class Infeasible(SolverError):
    """No commitment at all can serve the load."""


class TooLarge(SolverError):
    """Problem exceeds the exhaustive-enumeration guard."""


class InfeasibleRelaxation(SolverError):
    """The relaxed first block is infeasible, hence so is the full problem."""


class HasCouplings(SolverError):
    """A solver limited to diagonal QUBOs received quadratic couplings."""


class TooManyQubits(SolverError):
    """Statevector simulation size guard exceeded."""


class DimensionMismatch(SolverError):
    """State and operator dimensions disagree."""


class InstanceMismatch(SolverError):
    """Two reports being compared come from different instances."""
