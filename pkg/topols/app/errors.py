from typing import Optional


class TopolsError(Exception):
    """Base class for errors raised by the compiler."""


class QasmError(TopolsError, ValueError):
    """The circuit source could not be parsed or uses an unsupported feature."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class CapacityError(TopolsError, ValueError):
    """The circuit does not fit on the configured grid."""


class TensorSizeError(TopolsError, ValueError):
    """A diagram is too large for brute-force tensor evaluation."""


class CompileError(TopolsError, RuntimeError):
    """Compilation produced an invalid result or could not proceed."""


class InvalidDiagramError(TopolsError, ValueError):
    """A pipe diagram violates its structural or colouring rules."""

    def __init__(self, message: str, violations=None):
        self.violations = list(violations or [])
        super().__init__(message)
