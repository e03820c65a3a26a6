"""
Process-wide diagnostic counters.

Numerical code that has to fall back to a one-sided derivative (for
example at a kink of the signed distance) records the event here instead
of failing.
"""

import logging
import threading
from collections import Counter
from typing import Dict

logger = logging.getLogger(__name__)


class DiagnosticCounter:
    """Thread-safe named event counter."""

    def __init__(self):
        """Initialize the counter."""
        self._counts: Counter = Counter()
        self._lock = threading.Lock()

    def increment(self, name: str, amount: int = 1) -> None:
        """Record ``amount`` occurrences of the event ``name``."""
        with self._lock:
            self._counts[name] += amount
        logger.debug(f"Diagnostic event: {name}")

    def get(self, name: str) -> int:
        with self._lock:
            return self._counts[name]

    def snapshot(self) -> Dict[str, int]:
        """Get a copy of all counts."""
        with self._lock:
            return dict(self._counts)

    def reset(self) -> None:
        with self._lock:
            self._counts.clear()


SIGNED_DISTANCE_KINK = "signed_distance_kink"

# Global counter instance
diagnostics = DiagnosticCounter()
