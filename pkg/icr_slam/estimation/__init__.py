"""
State estimation: the joint robot/landmark EKF.
"""

from icr_slam.estimation.ekf import (
    JointBelief,
    entropies,
    gaussian_entropy,
    initial_belief,
    landmark_means,
    landmark_sigma,
    nees,
    nees_bounds,
    predict,
    reconstruct_measurement,
    robot_pose,
    update,
)

__all__ = [
    "JointBelief",
    "entropies",
    "gaussian_entropy",
    "initial_belief",
    "landmark_means",
    "landmark_sigma",
    "nees",
    "nees_bounds",
    "predict",
    "reconstruct_measurement",
    "robot_pose",
    "update",
]
