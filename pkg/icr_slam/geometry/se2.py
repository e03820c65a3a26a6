"""
Planar rigid-body primitives.

Poses are stored in the (p, θ) chart: a pose vector is ``[px, py, theta]``
with theta wrapped to [-π, π). The homogeneous SE(2) matrix is only a
derived view kept for interoperability.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

TWO_PI = 2.0 * np.pi


def wrap_angle(theta):
    """Wrap an angle (or array of angles) to the half-open interval [-π, π).

    Args:
        theta: Angle in radians, scalar or array

    Returns:
        Congruent angle in [-π, π), same shape as the input
    """
    wrapped = np.mod(np.asarray(theta, dtype=float) + np.pi, TWO_PI) - np.pi
    # np.mod can round up to exactly 2π for tiny negative inputs
    wrapped = np.where(wrapped >= np.pi, wrapped - TWO_PI, wrapped)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


def rotation_matrix(theta: float) -> np.ndarray:
    """R(θ) = [[cos θ, -sin θ], [sin θ, cos θ]]."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def rotation_matrix_derivative(theta: float) -> np.ndarray:
    """dR/dθ = [[-sin θ, -cos θ], [cos θ, -sin θ]]."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[-s, -c], [c, -s]])


@dataclass(frozen=True)
class Rotation2:
    """A planar rotation by a heading angle (radians, wrapped)."""
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", wrap_angle(self.theta))

    @property
    def matrix(self) -> np.ndarray:
        return rotation_matrix(self.theta)

    def inverse(self) -> "Rotation2":
        return Rotation2(-self.theta)

    def compose(self, other: "Rotation2") -> "Rotation2":
        return Rotation2(self.theta + other.theta)


@dataclass(frozen=True)
class Pose2:
    """Planar pose: position ``p`` in meters and heading ``theta`` in radians."""
    p: np.ndarray
    theta: float

    def __post_init__(self):
        p = np.array(self.p, dtype=float).reshape(2)
        p.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "theta", wrap_angle(self.theta))

    @classmethod
    def from_vector(cls, x) -> "Pose2":
        x = np.asarray(x, dtype=float)
        return cls(x[:2], x[2])

    def as_vector(self) -> np.ndarray:
        return np.array([self.p[0], self.p[1], self.theta])

    @property
    def rotation(self) -> Rotation2:
        return Rotation2(self.theta)

    def as_matrix(self) -> np.ndarray:
        """Homogeneous SE(2) view [[R(θ), p], [0, 1]]."""
        t = np.eye(3)
        t[:2, :2] = rotation_matrix(self.theta)
        t[:2, 2] = self.p
        return t

    @classmethod
    def from_matrix(cls, t: np.ndarray) -> "Pose2":
        t = np.asarray(t, dtype=float)
        return cls(t[:2, 2], np.arctan2(t[1, 0], t[0, 0]))


PoseLike = Union[Pose2, np.ndarray, list, tuple]


def pose_vector(x: PoseLike) -> np.ndarray:
    """Coerce a Pose2 or a length-3 sequence into a float pose vector."""
    if isinstance(x, Pose2):
        return x.as_vector()
    return np.asarray(x, dtype=float).reshape(3)
