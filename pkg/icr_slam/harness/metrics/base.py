"""
Base classes for per-step trial metrics.

Each calculator turns one (belief, ground truth) snapshot into a single
number; the registry keeps them in registration order, which is also the
column order of the metric files.
"""

import logging
from abc import ABC, abstractmethod
from typing import Dict, List, Optional

import numpy as np

from icr_slam.estimation.ekf import JointBelief

logger = logging.getLogger(__name__)


class BaseMetricCalculator(ABC):
    """One per-step trial metric.

    Subclasses set ``name`` to the output column and implement calculate.
    """

    name: str = ""

    def get_name(self) -> str:
        """Get the column name, falling back to the class name."""
        return self.name or self.__class__.__name__

    @abstractmethod
    def calculate(self, belief: JointBelief, x_true: np.ndarray, landmarks_true: np.ndarray) -> float:
        """Calculate the metric for one time step.

        Args:
            belief: Current posterior belief
            x_true: True robot pose
            landmarks_true: True landmark positions, (n_l, 2)

        Returns:
            The metric value
        """


class MetricRegistry:
    """Ordered collection of metric calculators.

    Keeps calculators in registration order and runs them together.
    """

    def __init__(self):
        self._calculators: Dict[str, BaseMetricCalculator] = {}

    def register(self, calculator: BaseMetricCalculator) -> None:
        """Add ``calculator`` under its column name.

        Args:
            calculator: Calculator whose name becomes a metric column
        """
        name = calculator.get_name()
        self._calculators[name] = calculator
        logger.debug(f"Registered metric calculator: {name}")

    def unregister(self, name: str) -> None:
        self._calculators.pop(name, None)

    def get_calculator(self, name: str) -> Optional[BaseMetricCalculator]:
        return self._calculators.get(name)

    def get_available_metrics(self) -> List[str]:
        """Get metric names in registration (column) order."""
        return list(self._calculators.keys())

    def run_all(self, belief: JointBelief, x_true: np.ndarray, landmarks_true: np.ndarray) -> Dict[str, float]:
        """Run every registered calculator on one snapshot.

        Returns:
            Dict mapping metric names to values, in column order
        """
        return {
            name: float(calculator.calculate(belief, x_true, landmarks_true))
            for name, calculator in self._calculators.items()
        }


# Global registry instance
metric_registry = MetricRegistry()
