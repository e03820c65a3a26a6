"""
Robot motion and landmark covariance dynamics.
"""

from icr_slam.dynamics.motion import (
    ControlBounds,
    ControlInput,
    MotionJacobians,
    ProcessNoiseModel,
    jacobians,
    sample_noise,
    sample_step,
    step,
)
from icr_slam.dynamics.covariance import (
    RiccatiJacobians,
    block_trace,
    check_cov_vector,
    riccati_block_vector,
    riccati_general,
    riccati_jacobians,
    riccati_step,
    unvecbl,
    vecbl,
)

__all__ = [
    "ControlBounds",
    "ControlInput",
    "MotionJacobians",
    "ProcessNoiseModel",
    "jacobians",
    "sample_noise",
    "sample_step",
    "step",
    "RiccatiJacobians",
    "block_trace",
    "check_cov_vector",
    "riccati_block_vector",
    "riccati_general",
    "riccati_jacobians",
    "riccati_step",
    "unvecbl",
    "vecbl",
]
