"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An argument violates an operation's precondition."""


class SingularCoefficientError(ArithmeticError):
    """The p-sub-Laplacian coefficient is singular (p < 2, zero gradient, no regularisation)."""


class NumericalBlowUp(ArithmeticError):
    """The explicit scheme produced non-finite or runaway values."""

    def __init__(self, message, step=None, time=None):
        super().__init__(message)
        self.step = step
        self.time = time


class MaxStepsExceeded(RuntimeError):
    """``solve`` ran out of its step budget before reaching the horizon."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class PreconditionError(ValueError):
    """A hypothesis required by a harness is not met by its inputs."""


class InfeasibleError(ValueError):
    """No admissible configuration exists for the requested construction."""


class ConfigError(ValueError):
    """A run configuration is unreadable or names an invalid value."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
