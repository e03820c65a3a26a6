"""
Pydantic schemas for icr-slam.

Only the error models are re-exported here; configuration models live in
icr_slam.schemas.config, which depends on the numerical modules.
"""

from icr_slam.schemas.errors import ErrorDetail, ErrorResponse, ValidationErrorItem, items_from_pydantic

__all__ = [
    "ErrorDetail",
    "ErrorResponse",
    "ValidationErrorItem",
    "items_from_pydantic",
]
