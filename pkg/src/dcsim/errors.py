"""Exception types shared across the simulator."""


class DcsimError(Exception):
    """Base class for all simulator errors."""


class ConfigError(DcsimError, ValueError):
    """A scenario/plant configuration field violates its documented domain.

    Attributes:
        field: Dotted path of the offending field (e.g. "hvac_configuration.C_AIR").
        constraint: Human-readable statement of the violated constraint.
    """

    def __init__(self, field, constraint):
        self.field = field
        self.constraint = constraint
        super().__init__(f"{field}: {constraint}")


class ConfigParseError(DcsimError, ValueError):
    """The scenario file could not be parsed as structured text."""

    def __init__(self, path, message, line=None):
        self.path = path
        self.line = line
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {message}")


class DataFormatError(DcsimError, ValueError):
    """An input time-series file does not match its documented format."""


class DataValidationError(DcsimError, ValueError):
    """An input time-series value is outside its documented domain.

    Attributes:
        row: 1-based data row the offending value came from, when known.
    """

    def __init__(self, message, row=None):
        self.row = row
        super().__init__(message if row is None else f"row {row}: {message}")


class DomainError(DcsimError, ValueError):
    """A numeric argument is outside the function's domain."""


class SingularityError(DcsimError, ArithmeticError):
    """A physical computation would divide by zero (e.g. heat with no airflow)."""


class ContractError(DcsimError, RuntimeError):
    """A controller or adapter violated the environment interface contract."""
