"""
Exception hierarchy for icr-slam.

All errors raised by the library derive from IcrSlamError so callers
(the CLI in particular) can map them onto exit statuses.
"""

from typing import List, Optional

from icr_slam.schemas.errors import ErrorDetail, ErrorResponse, ValidationErrorItem


class IcrSlamError(Exception):
    """Base class for all library errors."""


class InvalidInputError(IcrSlamError, ValueError):
    """An input violates a documented invariant (non-SPD matrix, bad polygon, ...)."""


class NumericalError(IcrSlamError):
    """A numerical failure inside one of the pipeline modules.

    Attributes:
        module: Name of the module that detected the failure
        step: Simulation or recursion step index, if known
    """

    def __init__(self, message: str, module: str, step: Optional[int] = None):
        self.message = message
        self.module = module
        self.step = step
        super().__init__(self._format())

    def _format(self) -> str:
        where = f"[{self.module}]"
        if self.step is not None:
            where += f" step {self.step}"
        return f"{where}: {self.message}"

    def with_step(self, step: int) -> "NumericalError":
        """Return a copy annotated with the harness step index.

        An already known step (e.g. an LQR recursion index) is kept in the message.
        """
        message = self.message
        if self.step is not None:
            message = f"{message} (inner step {self.step})"
        return NumericalError(message, module=self.module, step=step)


class ConfigError(IcrSlamError):
    """The configuration file could not be read or parsed."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class ConfigValidationError(IcrSlamError):
    """The configuration parsed but failed validation.

    Attributes:
        items: One ValidationErrorItem per offending field
    """

    def __init__(self, items: List[ValidationErrorItem]):
        self.items = items
        fields = ", ".join(item.field or "<root>" for item in items)
        super().__init__(f"Invalid configuration: {fields}")

    def to_response(self) -> ErrorResponse:
        """Render as the structured error response used in logs and CLI output."""
        return ErrorResponse(
            status="error",
            message="Invalid configuration",
            detail=ErrorDetail(errors=self.items),
        )
