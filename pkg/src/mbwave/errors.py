"""Exception hierarchy shared by all mbwave modules."""


class WaveSolverError(Exception):
    """Base class for all mbwave errors."""


class DomainError(WaveSolverError):
    """An argument lies outside the validity window of a function."""


class InvalidMotionError(WaveSolverError):
    """Boundary motion violates L > 0 or |dL/dt| < 1.

    Carries ``t_offending``, the sample time at which the violation was
    detected.
    """

    def __init__(self, message: str, t_offending: float | None = None):
        super().__init__(message)
        self.t_offending = t_offending


class SingularityError(WaveSolverError):
    """Evaluation hit a pole or a vanishing denominator."""


class PreconditionError(WaveSolverError):
    """A documented precondition of an operation does not hold."""


class ConstructionError(WaveSolverError):
    """A derived object could not be built (e.g. non-monotone seed).

    ``stationary_point`` holds the offending coordinate when available.
    """

    def __init__(self, message: str, stationary_point: float | None = None):
        super().__init__(message)
        self.stationary_point = stationary_point


class UnsupportedScenarioError(WaveSolverError):
    """The requested method/motion combination is not available."""


class NonTerminationError(WaveSolverError):
    """An iteration cap was exceeded (signals an invalid input)."""


class IncompatibleInitialConditionError(WaveSolverError):
    """Initial data violates the corner compatibility relations."""
