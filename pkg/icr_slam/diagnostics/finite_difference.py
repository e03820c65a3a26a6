"""
Central finite differences for checking analytic Jacobians.
"""

import logging
from typing import Callable, Optional, Sequence

import numpy as np

from icr_slam.geometry.se2 import wrap_angle

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-6


def finite_difference_jacobian(
    func: Callable[[np.ndarray], np.ndarray],
    x0,
    eps: float = DEFAULT_STEP,
    angle_rows: Optional[Sequence[int]] = None,
) -> np.ndarray:
    """Centered-difference Jacobian of ``func`` at ``x0``.

    Args:
        func: Map from an n-vector to an array (flattened to m entries)
        x0: Evaluation point
        eps: Step size
        angle_rows: Output entries that are angles; their differences are wrapped

    Returns:
        Array of shape (m, n)
    """
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    columns = []
    for j in range(x0.size):
        x = x0.copy()
        x[j] = x0[j] + eps
        f_plus = np.asarray(func(x), dtype=float).reshape(-1)
        x[j] = x0[j] - eps
        f_minus = np.asarray(func(x), dtype=float).reshape(-1)
        diff = f_plus - f_minus
        if angle_rows is not None:
            idx = list(angle_rows)
            diff[idx] = wrap_angle(diff[idx])
        columns.append(diff / (2.0 * eps))
    return np.stack(columns, axis=1)


RELATIVE_ERROR_FLOOR = 1e-12


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = RELATIVE_ERROR_FLOOR) -> float:
    """‖A − N‖_F / max(‖N‖_F, floor).

    The floor only guards the division when the reference is exactly zero.
    """
    analytic = np.asarray(analytic, dtype=float)
    numeric = np.asarray(numeric, dtype=float).reshape(analytic.shape)
    return float(np.linalg.norm(analytic - numeric) / max(np.linalg.norm(numeric), floor))
