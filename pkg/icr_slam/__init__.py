"""
icr-slam: active SLAM with iterative covariance regulation and affine LQR.
"""

__version__ = "0.1.0"
