"""Exception types shared across the package."""


class DomainError(ValueError):
    """A conjugate or derivative was requested outside its finite domain."""


class DegenerateSampleError(ValueError):
    """Sample moments unusable for fitting (zero variance or nonpositive mean)."""


class InfeasibleProblemError(RuntimeError):
    """The requested bound does not exist for this divergence/payoff pair."""


class NonConvergenceError(RuntimeError):
    """The descent loop exhausted its iteration budget without converging."""


class NormalizationError(RuntimeError):
    """A worst-case density failed its consistency checks, indicating a bad optimum."""


class InputDataError(ValueError):
    """Base class for CSV ingestion failures.  ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MalformedRowError(InputDataError):
    """A CSV row could not be parsed as (ISO date, positive value)."""


class NonMonotoneDateError(InputDataError):
    """Observation dates are not strictly increasing."""


class TooFewRowsError(InputDataError):
    """Fewer than two observations were supplied."""
