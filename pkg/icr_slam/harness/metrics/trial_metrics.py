"""
Trial metrics: estimation errors and differential entropies.

Errors are single-trial root-square errors; averaging across trials is
done by the aggregation step.
"""

import numpy as np

from icr_slam.estimation.ekf import JointBelief, entropies, gaussian_entropy, landmark_means
from icr_slam.geometry.se2 import wrap_angle
from icr_slam.harness.metrics.base import BaseMetricCalculator, metric_registry


class RobotPositionErrorCalculator(BaseMetricCalculator):
    """Euclidean distance between estimated and true robot position (m)."""

    name = "robot_rmse_pos"

    def calculate(self, belief: JointBelief, x_true: np.ndarray, landmarks_true: np.ndarray) -> float:
        return float(np.linalg.norm(belief.mean[:2] - x_true[:2]))


class RobotHeadingErrorCalculator(BaseMetricCalculator):
    """Absolute wrapped heading error (rad), never above π."""

    name = "robot_rmse_theta"

    def calculate(self, belief: JointBelief, x_true: np.ndarray, landmarks_true: np.ndarray) -> float:
        return float(abs(wrap_angle(belief.mean[2] - x_true[2])))


class RobotEntropyCalculator(BaseMetricCalculator):
    name = "robot_entropy"

    def calculate(self, belief: JointBelief, x_true: np.ndarray, landmarks_true: np.ndarray) -> float:
        return gaussian_entropy(belief.cov[:3, :3])


class LandmarkErrorCalculator(BaseMetricCalculator):
    """Root mean square landmark position error over all landmarks (m)."""

    name = "lm_rmse"

    def calculate(self, belief: JointBelief, x_true: np.ndarray, landmarks_true: np.ndarray) -> float:
        sq = np.sum((landmark_means(belief) - landmarks_true) ** 2, axis=1)
        return float(np.sqrt(np.mean(sq)))


class LandmarkEntropyCalculator(BaseMetricCalculator):
    """Mean of the per-landmark marginal entropies."""

    name = "lm_entropy_avg"

    def calculate(self, belief: JointBelief, x_true: np.ndarray, landmarks_true: np.ndarray) -> float:
        _, per_landmark, _ = entropies(belief)
        return float(np.mean(per_landmark))


class JointEntropyCalculator(BaseMetricCalculator):
    name = "joint_entropy"

    def calculate(self, belief: JointBelief, x_true: np.ndarray, landmarks_true: np.ndarray) -> float:
        return gaussian_entropy(belief.cov)


# Registration order is the metric file column order
metric_registry.register(RobotPositionErrorCalculator())
metric_registry.register(RobotHeadingErrorCalculator())
metric_registry.register(RobotEntropyCalculator())
metric_registry.register(LandmarkErrorCalculator())
metric_registry.register(LandmarkEntropyCalculator())
metric_registry.register(JointEntropyCalculator())
