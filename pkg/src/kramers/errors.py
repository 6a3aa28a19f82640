"""Exception and warning types shared across the package."""


class KramersError(Exception):
    """Base class for all package errors."""


class ConfigError(KramersError, ValueError):
    """Inconsistent or incomplete configuration (wrong combination of inputs)."""


class ValidationError(KramersError, ValueError):
    """A value violates a documented invariant (sign, range, shape rule)."""


class GridMismatchError(KramersError, ValueError):
    """Operands live on different grids."""


class DegenerateKernelError(KramersError, ValueError):
    """Projection kernel is degenerate (T = 0 makes the Gaussian width vanish)."""


class DivergenceError(KramersError, RuntimeError):
    """Time integration produced a non-finite or exploding field.

    Carries the last good trajectory (if any) in ``trajectory`` and the RK4
    stage name (if applicable) in ``stage``.
    """

    def __init__(self, message, *, stage=None, trajectory=None):
        super().__init__(message)
        self.stage = stage
        self.trajectory = trajectory


class BoundaryLeakWarning(UserWarning):
    """Field amplitude at the momentum-grid edges exceeds the boundary tolerance."""


class AccuracyWarning(UserWarning):
    """A parameter combination degrades accuracy (kernel vs. domain sizing, etc.)."""


class ExtrapolationWarning(UserWarning):
    """Characteristics left the momentum domain where the density is non-negligible."""
