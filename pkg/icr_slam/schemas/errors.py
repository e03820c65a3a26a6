"""
Error schema models.

This module contains Pydantic models used to report configuration
validation failures in a structured way.
"""

from typing import List, Optional

from pydantic import BaseModel, Field


class ValidationErrorItem(BaseModel):
    """A single validation error."""
    field: Optional[str] = Field(
        None,
        description="Dotted path of the configuration field that caused the error",
        examples=["sensor.kappa"]
    )
    message: str = Field(
        ...,
        description="What is wrong with the value",
        examples=["kappa must be positive"]
    )
    type: str = Field(
        ...,
        description="pydantic error type",
        examples=["value_error"]
    )


class ErrorDetail(BaseModel):
    """Details of a validation failure."""
    errors: List[ValidationErrorItem] = Field(
        ...,
        description="One entry per invalid field"
    )


class ErrorResponse(BaseModel):
    """Standard error report format."""
    status: str = Field(
        "error",
        description="Always \"error\" for failures",
        examples=["error"]
    )
    message: str = Field(
        ...,
        description="Summary of the failure",
        examples=["Invalid configuration"]
    )
    detail: Optional[ErrorDetail] = Field(
        None,
        description="Per-field details, when validation failed"
    )


def items_from_pydantic(errors: List[dict], prefix: Optional[str] = None) -> List[ValidationErrorItem]:
    """Convert pydantic's ``ValidationError.errors()`` into error items.

    Args:
        errors: The raw error dictionaries from pydantic
        prefix: Optional dotted prefix to prepend to every field path

    Returns:
        List of ValidationErrorItem
    """
    items = []
    for error in errors:
        loc = [str(part) for part in error.get("loc", ())]
        if prefix:
            loc = [prefix] + loc
        items.append(ValidationErrorItem(
            field=".".join(loc) if loc else None,
            message=error.get("msg", "invalid value"),
            type=error.get("type", "unknown_error"),
        ))
    return items
