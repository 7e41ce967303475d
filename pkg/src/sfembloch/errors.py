"""Exception hierarchy shared by all modules."""


class SfemBlochError(Exception):
    """Base class for every error raised by the package."""


class InvalidDegreeError(SfemBlochError, ValueError):
    pass


class NumericalFailureError(SfemBlochError, ArithmeticError):
    """An iterative routine did not converge."""


class ConfigurationError(SfemBlochError, ValueError):
    def __init__(self, message, key=None):
        self.key = key
        if key is not None:
            message = f"[{key}] {message}"
        super().__init__(message)


class PartitionError(SfemBlochError):
    pass


class AssemblyError(SfemBlochError):
    pass


class TransformError(SfemBlochError):
    pass


class SolverError(SfemBlochError):
    pass


class NegativeEigenvalueError(SolverError):
    pass


class ReportError(SfemBlochError):
    pass
