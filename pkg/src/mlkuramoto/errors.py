"""Exception types raised across the package."""


class ParameterError(ValueError):
    """A generator or operation received an out-of-range parameter."""


class GenerationError(RuntimeError):
    """Random graph generation could not satisfy its constraints."""


class RegularityError(ValueError):
    """A block that should be row-regular has unequal row sums."""

    def __init__(self, message, rows=()):
        super().__init__(message)
        self.rows = tuple(rows)


class AssumptionError(ValueError):
    """Preconditions of the stability analysis are violated."""


class ConnectivityError(AssumptionError):
    """A layer graph is not connected."""


class NotEquilibriumError(ValueError):
    """A phase vector is not an equilibrium of the reduced system."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class DivergenceError(ArithmeticError):
    """Integration produced a non-finite value."""

    def __init__(self, message, step):
        super().__init__(message)
        self.step = step


class ConvergenceError(RuntimeError):
    """The eigenvalue iteration did not converge."""


class ConfigError(ValueError):
    """Invalid scenario configuration; ``path`` locates the offending field."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
