"""
Planar geometry: SE(2) poses, rotations and field-of-view polygons.
"""

from icr_slam.geometry.se2 import (
    Pose2,
    PoseLike,
    Rotation2,
    pose_vector,
    rotation_matrix,
    rotation_matrix_derivative,
    wrap_angle,
)
from icr_slam.geometry.fov import (
    FovPolygon,
    SignedDistance,
    signed_distance,
    signed_distance_with_gradient,
)

__all__ = [
    "Pose2",
    "PoseLike",
    "Rotation2",
    "pose_vector",
    "rotation_matrix",
    "rotation_matrix_derivative",
    "wrap_angle",
    "FovPolygon",
    "SignedDistance",
    "signed_distance",
    "signed_distance_with_gradient",
]
