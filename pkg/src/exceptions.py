class SimulationError(Exception):
    """Base class for physics and numerics failures (CLI exit code 3)."""


class InvalidParameterError(SimulationError, ValueError):
    pass


class InvalidDatasheetError(InvalidParameterError):
    pass


class UnphysicalVoltageError(SimulationError, ValueError):
    """1 + eta*V(t) left the positive range, so the light speed is undefined."""


class UncorrectableCellError(SimulationError, ValueError):
    """A cell with eta == 0 cannot produce any frequency shift."""


class NonIntegrableBranchError(SimulationError, ValueError):
    pass


class NumericalError(SimulationError, ArithmeticError):
    pass


class ConfigError(ValueError):
    """Run configuration could not be parsed or validated (CLI exit code 2)."""

    def __init__(self, message: str, field: str = "", line: int = 0):
        self.message = message
        self.field = field
        self.line = line
        parts = []
        if line:
            parts.append(f"line {line}")
        if field:
            parts.append(f"field '{field}'")
        location = ", ".join(parts)
        super().__init__(f"{location}: {message}" if location else message)
