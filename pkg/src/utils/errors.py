"""Exception hierarchy shared by every akmeter module.

All errors derive from ``AkmeterError`` (a ``ValueError``), so callers that
only care about "bad input or unsupported request" can catch one type. The
CLI maps ``AkmeterError`` to exit code 1.
"""


class AkmeterError(ValueError):
    """Base class for all akmeter failures."""


class NonTerminatingSeries(AkmeterError):
    """An iterated commutator series did not vanish within ``max_steps``."""


class NotLinear(AkmeterError):
    """A polynomial of degree two or more was passed where a linear form is needed."""


class ExpressionError(AkmeterError):
    """Plain-text operator expression could not be parsed."""


class DomainError(AkmeterError):
    """A parameter lies outside its mathematical domain."""


class AdmissibilityError(AkmeterError):
    """A covariance matrix violates the Heisenberg positivity condition."""


class ResolutionError(AkmeterError):
    """A lattice cannot faithfully represent the requested wave packets."""


class DimensionError(AkmeterError):
    """A dense-matrix check was requested beyond the supported dimension."""


class ScenarioError(AkmeterError):
    """A scenario file is malformed or has out-of-domain fields."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        location = ""
        if field is not None:
            location = f"field '{field}'"
            if line is not None:
                location += f" (line {line})"
            location += ": "
        super().__init__(location + message)
