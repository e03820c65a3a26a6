"""
Differential-drive stochastic kinematics and their Jacobians.

    f(x, u, w) = x + τ [v sinc(a) cos(θ + a), v sinc(a) sin(θ + a), ω]ᵀ + w,
    a = ωτ/2, sinc(a) = sin(a)/a (unnormalized, sinc(0) = 1).

Noise enters additively, so D = ∂f/∂w is the identity.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from icr_slam.errors import InvalidInputError
from icr_slam.geometry.se2 import PoseLike, pose_vector, wrap_angle
from icr_slam.linalg import psd_sqrt, require_psd

# Below this |a| the sinc derivative is evaluated by its Taylor series
SINC_SERIES_THRESHOLD = 1e-4


def sinc(a: float) -> float:
    """Unnormalized sinc, sin(a)/a with sinc(0) = 1."""
    return float(np.sinc(a / np.pi))


def sinc_derivative(a: float) -> float:
    """d sinc / da, series-expanded near zero to avoid cancellation."""
    if abs(a) < SINC_SERIES_THRESHOLD:
        return -a / 3.0 + a ** 3 / 30.0
    return (a * np.cos(a) - np.sin(a)) / (a * a)


@dataclass(frozen=True)
class ControlInput:
    """Linear velocity ``v`` (m/s) and angular velocity ``omega`` (rad/s)."""
    v: float
    omega: float

    @classmethod
    def from_vector(cls, u) -> "ControlInput":
        u = np.asarray(u, dtype=float)
        return cls(float(u[0]), float(u[1]))

    def as_vector(self) -> np.ndarray:
        return np.array([self.v, self.omega])


@dataclass(frozen=True)
class ControlBounds:
    """Box bounds [v_min, v_max] × [-omega_max, omega_max]."""
    v_max: float = 3.0
    omega_max: float = 1.0
    v_min: float = 0.0

    def __post_init__(self):
        if not self.v_min <= self.v_max or self.omega_max < 0:
            raise InvalidInputError("control bounds need v_min <= v_max and omega_max >= 0")

    @property
    def lower(self) -> np.ndarray:
        return np.array([self.v_min, -self.omega_max])

    @property
    def upper(self) -> np.ndarray:
        return np.array([self.v_max, self.omega_max])

    def clamp(self, u) -> np.ndarray:
        """Clamp a control vector (or a (K, 2) sequence) into the box."""
        return np.clip(np.asarray(u, dtype=float), self.lower, self.upper)


@dataclass(frozen=True)
class ProcessNoiseModel:
    """Additive process noise covariance ``W`` and time step ``tau`` (s).

    ``W`` may be singular (W = 0 gives noiseless motion).
    """
    W: np.ndarray
    tau: float
    _sqrt_w: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        w = require_psd(np.asarray(self.W, dtype=float).reshape(3, 3), "W")
        if not self.tau > 0:
            raise InvalidInputError("tau must be positive")
        object.__setattr__(self, "W", w)
        object.__setattr__(self, "_sqrt_w", psd_sqrt(w))


class MotionJacobians(NamedTuple):
    E: np.ndarray
    B: np.ndarray
    D: np.ndarray


def _control_vector(u) -> np.ndarray:
    if isinstance(u, ControlInput):
        return u.as_vector()
    return np.asarray(u, dtype=float).reshape(2)


def displacement(theta: float, u, tau: float) -> np.ndarray:
    """The deterministic increment τ[v sinc(a) cos(θ+a), v sinc(a) sin(θ+a), ω]."""
    v, omega = _control_vector(u)
    a = 0.5 * omega * tau
    s = sinc(a)
    return tau * np.array([v * s * np.cos(theta + a), v * s * np.sin(theta + a), omega])


def step(x: PoseLike, u, w, model: ProcessNoiseModel) -> np.ndarray:
    """Propagate a pose one time step.

    Args:
        x: Current pose
        u: Control (ControlInput or [v, omega])
        w: Additive noise 3-vector
        model: Noise model supplying τ

    Returns:
        Next pose vector [px, py, theta] with the heading wrapped
    """
    x = pose_vector(x)
    nxt = x + displacement(x[2], u, model.tau) + np.asarray(w, dtype=float).reshape(3)
    nxt[2] = wrap_angle(nxt[2])
    return nxt


def sample_noise(model: ProcessNoiseModel, rng: np.random.Generator) -> np.ndarray:
    """Draw w ~ N(0, W)."""
    return model._sqrt_w @ rng.standard_normal(3)


def sample_step(x: PoseLike, u, model: ProcessNoiseModel, rng: np.random.Generator) -> np.ndarray:
    """step(x, u, w) with w drawn from N(0, W) using the caller's stream."""
    return step(x, u, sample_noise(model, rng), model)


def jacobians(x: PoseLike, u, model: ProcessNoiseModel) -> MotionJacobians:
    """Analytic ∂f/∂x, ∂f/∂u, ∂f/∂w at (x, u, 0).

    The heading wrap is ignored (identity almost everywhere).
    """
    theta = pose_vector(x)[2]
    v, omega = _control_vector(u)
    tau = model.tau
    a = 0.5 * omega * tau
    s = sinc(a)
    ds = sinc_derivative(a)
    c, sn = np.cos(theta + a), np.sin(theta + a)

    e = np.eye(3)
    e[0, 2] = -tau * v * s * sn
    e[1, 2] = tau * v * s * c

    b = np.zeros((3, 2))
    b[0, 0] = tau * s * c
    b[1, 0] = tau * s * sn
    half = 0.5 * tau
    b[0, 1] = tau * v * half * (ds * c - s * sn)
    b[1, 1] = tau * v * half * (ds * sn + s * c)
    b[2, 1] = tau

    return MotionJacobians(E=e, B=b, D=np.eye(3))

