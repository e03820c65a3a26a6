"""
Metric calculators for simulation trials.
"""

from icr_slam.harness.metrics.base import BaseMetricCalculator, MetricRegistry, metric_registry
from icr_slam.harness.metrics import trial_metrics

# Column order of every metric table
METRIC_COLUMNS = tuple(metric_registry.get_available_metrics())

__all__ = [
    "BaseMetricCalculator",
    "MetricRegistry",
    "metric_registry",
    "trial_metrics",
    "METRIC_COLUMNS",
]
