class ScatteringError(Exception):
    """Base class for every error raised by the imaging library"""
    exit_code = 2


class InputValidationError(ScatteringError, ValueError):
    """Invalid input: bad arguments, malformed files, inconsistent parameters"""
    exit_code = 1


class DomainError(InputValidationError):
    pass


class OrderOverflowError(InputValidationError):
    pass


class DimensionError(InputValidationError):
    pass


class NotHermitianError(InputValidationError):
    pass


class GeometryError(InputValidationError):
    pass


class DataFormatError(InputValidationError):
    pass


class WavenumberMismatchError(InputValidationError):
    pass


class SceneParseError(InputValidationError):
    """Scene or config text could not be parsed"""

    def __init__(self, message: str, line: int = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericalError(ScatteringError):
    """A numerical procedure failed to reach its accuracy target"""
    exit_code = 2


class ConvergenceError(NumericalError):
    pass


class ResidualError(NumericalError):
    """Forward solve rejected by the boundary residual gate"""

    def __init__(self, residual: float, tolerance: float):
        self.residual = residual
        self.tolerance = tolerance
        super().__init__(
            f"Boundary residual {residual:.3e} exceeds tolerance {tolerance:.3e}"
        )
