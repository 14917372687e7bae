"""Exception types raised across the package."""


class ParameterError(ValueError):
    """Invalid problem data (asymmetric matrix, p <= 1, ...)."""


class PreconditionError(ValueError):
    """An operation was called outside the regime where it is defined."""


class InfiniteMeasureError(ValueError):
    """The weighted measure has infinite mass on the requested domain."""


class DivergentIntegralError(ArithmeticError):
    """A quadrature did not converge because the integral is infinite."""

    def __init__(self, message, exponent=None):
        super().__init__(message)
        self.exponent = exponent


class MembershipError(DivergentIntegralError):
    """A test function is not in the weighted Sobolev space it was used in."""


class WrongEntryPointError(ValueError):
    """Radial quadrature was asked to integrate against an anisotropic measure."""


class StepRejected(RuntimeError):
    """The nonlinear solve of one time step did not converge."""

    def __init__(self, message, suggested_dt=None):
        super().__init__(message)
        self.suggested_dt = suggested_dt


class SolutionOverflow(FloatingPointError):
    """A time step produced non-finite values."""


class NoWitnessFound(RuntimeError):
    """The optimality sweep found no function below the requested level."""

    def __init__(self, message, sweep=None):
        super().__init__(message)
        self.sweep = sweep
