"""
Relative-position sensing with a differentiable field of view.

A landmark y is measured in the robot body frame, q = Rᵀ(θ)(y − p). The
hard FoV decides which landmarks produce a measurement; the planner and
the filter instead use the smooth visibility factor 1 − Φ(d(q, F)) with

    Φ(d) = ½ [1 + erf(d / (√2 κ) − 2)],

which scales the sensor information block M̄ = (1 − Φ) R Γ⁻¹ Rᵀ.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from scipy.special import erfc

from icr_slam.diagnostics.counters import SIGNED_DISTANCE_KINK, diagnostics
from icr_slam.errors import InvalidInputError
from icr_slam.geometry.fov import FovPolygon, signed_distance, signed_distance_with_gradient
from icr_slam.geometry.se2 import (
    PoseLike,
    pose_vector,
    rotation_matrix,
    rotation_matrix_derivative,
)
from icr_slam.linalg import psd_sqrt, require_spd

logger = logging.getLogger(__name__)

VISIBILITY_FLOOR = 1e-12
# Fixed offset inside the erf argument
ERF_OFFSET = 2.0
# Selection matrix Q = [I₂ 0] extracting p from x
POSITION_SELECTOR = np.hstack([np.eye(2), np.zeros((2, 1))])


@dataclass(frozen=True)
class SensorModel:
    """Measurement noise Γ (m²), FoV smoothness κ > 0 and the FoV polygon."""
    gamma: np.ndarray
    kappa: float
    fov: FovPolygon
    visibility_floor: float = VISIBILITY_FLOOR
    gamma_inv: np.ndarray = field(init=False, repr=False, compare=False)
    gamma_sqrt: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        gamma = require_spd(np.asarray(self.gamma, dtype=float).reshape(2, 2), "gamma")
        if not self.kappa > 0:
            raise InvalidInputError("kappa must be positive")
        if not 0 < self.visibility_floor < 1:
            raise InvalidInputError("visibility_floor must lie in (0, 1)")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "gamma_inv", np.linalg.inv(gamma))
        object.__setattr__(self, "gamma_sqrt", psd_sqrt(gamma))


def landmark_array(landmarks) -> np.ndarray:
    """Validate a landmark set and return it as an (n_l, 2) array."""
    arr = np.asarray(landmarks, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, 2)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 1:
        raise InvalidInputError("landmarks must be a non-empty list of 2-D points")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("landmark positions must be finite")
    return arr


@dataclass(frozen=True)
class LandmarkSet:
    """Point landmarks y⁽ʲ⁾ in meters."""
    positions: np.ndarray

    def __post_init__(self):
        arr = landmark_array(self.positions)
        arr.setflags(write=False)
        object.__setattr__(self, "positions", arr)

    def __len__(self) -> int:
        return self.positions.shape[0]


def body_frame_coords(x: PoseLike, y) -> np.ndarray:
    """q = Rᵀ(θ)(y − p)."""
    x = pose_vector(x)
    return rotation_matrix(x[2]).T @ (np.asarray(y, dtype=float) - x[:2])


def body_frame_jacobian(x: PoseLike, y) -> np.ndarray:
    """∂q/∂x = R′ᵀ(θ)(y − Qx)e₃ᵀ − Rᵀ(θ)Q, a 2×3 matrix."""
    x = pose_vector(x)
    jac = -rotation_matrix(x[2]).T @ POSITION_SELECTOR
    jac[:, 2] += rotation_matrix_derivative(x[2]).T @ (np.asarray(y, dtype=float) - x[:2])
    return jac


def _erf_argument(d: float, kappa: float) -> float:
    return d / (np.sqrt(2.0) * kappa) - ERF_OFFSET


def visibility_from_distance(d: float, sensor: SensorModel) -> float:
    """1 − Φ(d), clamped below at the sensor's visibility floor."""
    # 1 − Φ = ½ erfc(arg), computed directly to keep precision far outside
    value = 0.5 * float(erfc(_erf_argument(d, sensor.kappa)))
    return max(value, sensor.visibility_floor)


def visibility_derivative(d: float, sensor: SensorModel) -> float:
    """d(1 − Φ)/dd = −Φ′(d); zero where the floor is active."""
    raw = 0.5 * float(erfc(_erf_argument(d, sensor.kappa)))
    if raw <= sensor.visibility_floor:
        return 0.0
    arg = _erf_argument(d, sensor.kappa)
    return -np.exp(-arg * arg) / (np.sqrt(2.0 * np.pi) * sensor.kappa)


def visibility_factor(q, sensor: SensorModel) -> float:
    """Smooth visibility 1 − Φ(d(q, F)) of a body-frame point, in (0, 1)."""
    return visibility_from_distance(signed_distance(q, sensor.fov), sensor)


def visible_set(x: PoseLike, landmarks, sensor: SensorModel) -> List[int]:
    """Indices j whose body-frame position lies in the closed FoV polygon."""
    x = pose_vector(x)
    return [
        j for j, y in enumerate(landmark_array(landmarks))
        if signed_distance(body_frame_coords(x, y), sensor.fov) <= 0.0
    ]


def sample_measurements(
    x_true: PoseLike,
    landmarks,
    sensor: SensorModel,
    rng: np.random.Generator,
) -> List[Tuple[int, np.ndarray]]:
    """Noisy relative positions z̄ = q + Γ^{1/2} v of every visible landmark.

    Args:
        x_true: True robot pose
        landmarks: True landmark positions
        sensor: Sensor model
        rng: The caller's random stream

    Returns:
        List of (landmark index, 2-D measurement) in ascending index order
    """
    x_true = pose_vector(x_true)
    landmarks = landmark_array(landmarks)
    measurements = []
    for j in visible_set(x_true, landmarks, sensor):
        q = body_frame_coords(x_true, landmarks[j])
        measurements.append((j, q + sensor.gamma_sqrt @ rng.standard_normal(2)))
    return measurements


def _rotated_information(theta: float, sensor: SensorModel) -> np.ndarray:
    rot = rotation_matrix(theta)
    return rot @ sensor.gamma_inv @ rot.T


def info_block(x: PoseLike, y_hat, sensor: SensorModel) -> np.ndarray:
    """Sensor information block M̄ = (1 − Φ(d(q))) R(θ) Γ⁻¹ Rᵀ(θ)."""
    x = pose_vector(x)
    factor = visibility_factor(body_frame_coords(x, y_hat), sensor)
    block = factor * _rotated_information(x[2], sensor)
    return 0.5 * (block + block.T)


def measurement_noise(x: PoseLike, y_hat, sensor: SensorModel) -> np.ndarray:
    """Inflated noise V̄ = Γ / (1 − Φ(d(q)))."""
    return sensor.gamma / visibility_factor(body_frame_coords(x, y_hat), sensor)


def info_block_gradient(x: PoseLike, y_hat, sensor: SensorModel) -> np.ndarray:
    """∂M̄/∂x as an array of shape (3, 2, 2): derivatives w.r.t. x₁, x₂, θ.

    At signed-distance kinks the nearest-edge branch is used and the event
    is recorded in the diagnostic counter.
    """
    x = pose_vector(x)
    theta = x[2]
    q = body_frame_coords(x, y_hat)
    sd = signed_distance_with_gradient(q, sensor.fov)
    if sd.at_kink:
        diagnostics.increment(SIGNED_DISTANCE_KINK)
        logger.warning(f"Signed distance kink at body point {q}; using one-sided gradient")

    factor = visibility_from_distance(sd.distance, sensor)
    dfactor_dd = visibility_derivative(sd.distance, sensor)
    rotated = _rotated_information(theta, sensor)

    # −Φ′ · RΓ⁻¹Rᵀ · (∂d/∂q)(∂q/∂x)
    dd_dx = sd.gradient @ body_frame_jacobian(x, y_hat)
    grad = dfactor_dd * dd_dx[:, None, None] * rotated[None, :, :]

    a = rotation_matrix_derivative(theta) @ sensor.gamma_inv @ rotation_matrix(theta).T
    grad[2] += factor * (a + a.T)
    return grad


def info_vector(x: PoseLike, y_hat, sensor: SensorModel) -> np.ndarray:
    """m = (M̄₁₁, M̄₁₂, M̄₂₂)."""
    block = info_block(x, y_hat, sensor)
    return np.array([block[0, 0], block[0, 1], block[1, 1]])


def info_vector_gradient(x: PoseLike, y_hat, sensor: SensorModel) -> np.ndarray:
    """∂m/∂x, a 3×3 matrix whose rows follow the (m₁, m₂, m₃) order."""
    grad = info_block_gradient(x, y_hat, sensor)
    return np.stack([grad[:, 0, 0], grad[:, 0, 1], grad[:, 1, 1]])
