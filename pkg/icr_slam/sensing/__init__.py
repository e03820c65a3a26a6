"""
Limited field-of-view relative-position sensing.
"""

from icr_slam.sensing.fov_sensing import (
    LandmarkSet,
    SensorModel,
    body_frame_coords,
    body_frame_jacobian,
    info_block,
    info_block_gradient,
    info_vector,
    info_vector_gradient,
    measurement_noise,
    sample_measurements,
    visibility_factor,
    visible_set,
)

__all__ = [
    "LandmarkSet",
    "SensorModel",
    "body_frame_coords",
    "body_frame_jacobian",
    "info_block",
    "info_block_gradient",
    "info_vector",
    "info_vector_gradient",
    "measurement_noise",
    "sample_measurements",
    "visibility_factor",
    "visible_set",
]
