"""Exception hierarchy shared by every module in the package."""


class StarquantError(Exception):
    """Base class for all package errors."""


class DimensionError(StarquantError, ValueError):
    pass


class AxisError(StarquantError, ValueError):
    pass


class NumericError(StarquantError, ValueError):
    pass


class CapacityError(StarquantError, ValueError):
    pass


class InvertibilityError(StarquantError, ValueError):
    pass


class ConfigurationError(StarquantError, ValueError):
    pass


class ConvergenceError(StarquantError, RuntimeError):
    """Raised when an iterative projection fails to reach its tolerance.

    Attributes
    ----------
    residual : float
        Constraint residual norm at the last iterate.
    iterations : int
        Number of iterations performed.
    """

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
        self.record = None


class ParseError(StarquantError, ValueError):
    """Malformed document; ``path`` points into the offending JSON node."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class SchemaVersionError(StarquantError, ValueError):
    pass
