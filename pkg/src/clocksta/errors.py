"""Exception types raised across the package."""


class ClockSTAError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(ClockSTAError, ValueError):
    pass


class DomainError(ClockSTAError, ValueError):
    """Evaluation requested outside the protocol window."""


class SingularScheduleError(ClockSTAError, ValueError):
    """omega^2 <= 0 where a real frequency is required."""


class StiffnessError(ClockSTAError, RuntimeError):
    """Adaptive step size collapsed below the resolvable limit."""


class AccuracyError(ClockSTAError, RuntimeError):
    """Wronskian drift exceeded the accepted bound."""


class InvariantViolationError(ClockSTAError, ValueError):
    """A symplectic / Bogoliubov / physical-state invariant does not hold."""


class DegenerateStateError(ClockSTAError, ValueError):
    pass


class TargetViolationError(ClockSTAError, RuntimeError):
    """The v = 0 trajectory does not hit the STA target (beta_0 too large)."""


class OutOfRegimeError(ClockSTAError, ValueError):
    """Closed-form clock averages are undefined at this noise strength."""


class UndefinedRatioError(ClockSTAError, ZeroDivisionError):
    """TUR ratio requested with a vanishing mean energy deviation."""


class PropagationError(ClockSTAError, RuntimeError):
    """Failure while propagating a quadrature node of the clock average."""

    def __init__(self, message, node=None, v=None):
        super().__init__(message)
        self.node = node
        self.v = v
