"""
Numerical diagnostics.

The Jacobian check suite lives in icr_slam.diagnostics.jacobian_check and
is imported on demand.
"""

from icr_slam.diagnostics.counters import SIGNED_DISTANCE_KINK, DiagnosticCounter, diagnostics

__all__ = [
    "SIGNED_DISTANCE_KINK",
    "DiagnosticCounter",
    "diagnostics",
]
