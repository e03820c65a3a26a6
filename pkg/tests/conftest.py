"""
Shared pytest fixtures.
"""

import pytest

from icr_slam.diagnostics import diagnostics


@pytest.fixture(autouse=True)
def reset_diagnostics():
    """Start every test with empty diagnostic counters."""
    diagnostics.reset()
    yield
    diagnostics.reset()
