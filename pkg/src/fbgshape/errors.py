"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError and FrameParseError exit 2,
everything else derived from FbgShapeError exits 3.
"""


class FbgShapeError(Exception):
    """Base class for all package errors."""


class InvalidArgument(FbgShapeError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateInput(FbgShapeError, ValueError):
    """Input is geometrically degenerate (e.g. zero-length endpoint vector)."""


class GeometryError(FbgShapeError, ValueError):
    """Fiber/channel geometry is internally inconsistent."""


class InvalidState(FbgShapeError, RuntimeError):
    """Simulation or filter state left its admissible domain."""


class NumericalDegeneracy(FbgShapeError, ArithmeticError):
    """A numerical quantity that must be positive collapsed to <= 0."""


class FrameParseError(FbgShapeError, ValueError):
    """A frame file could not be parsed; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(FbgShapeError, ValueError):
    """A run configuration is malformed; names the offending key and line."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line
        loc = []
        if key is not None:
            loc.append(f"key '{key}'")
        if line is not None:
            loc.append(f"line {line}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
