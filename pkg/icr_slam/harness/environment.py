"""
Simulated landmark environments.
"""

import logging
from dataclasses import dataclass

import numpy as np

from icr_slam.errors import InvalidInputError
from icr_slam.harness.seeding import trial_streams
from icr_slam.sensing.fov_sensing import LandmarkSet

logger = logging.getLogger(__name__)

DEFAULT_BOUNDS = ((0.0, 100.0), (0.0, 70.0))


def bounds_array(bounds) -> np.ndarray:
    """Validate ((x_min, x_max), (y_min, y_max)) and return it as a 2×2 array."""
    arr = np.asarray(bounds, dtype=float)
    if arr.shape != (2, 2) or not np.all(np.isfinite(arr)) or np.any(arr[:, 0] >= arr[:, 1]):
        raise InvalidInputError("bounds must be ((x_min, x_max), (y_min, y_max)) with min < max")
    return arr


@dataclass(frozen=True)
class Environment:
    """Rectangular world with true landmark positions.

    Attributes:
        bounds: 2×2 array [[x_min, x_max], [y_min, y_max]] in meters
        landmarks_true: True landmark positions
        seed: Seed the landmarks were drawn from
    """
    bounds: np.ndarray
    landmarks_true: LandmarkSet
    seed: int

    def __post_init__(self):
        bounds = bounds_array(self.bounds)
        pts = self.landmarks_true.positions
        if np.any(pts < bounds[:, 0]) or np.any(pts > bounds[:, 1]):
            raise InvalidInputError("all landmarks must lie inside the environment bounds")
        bounds.setflags(write=False)
        object.__setattr__(self, "bounds", bounds)

    @property
    def center(self) -> np.ndarray:
        return self.bounds.mean(axis=1)

    @property
    def n_landmarks(self) -> int:
        return len(self.landmarks_true)


def generate_environment(bounds, n_landmarks: int, seed: int) -> Environment:
    """Place ``n_landmarks`` landmarks i.i.d. uniformly inside ``bounds``.

    Args:
        bounds: ((x_min, x_max), (y_min, y_max))
        n_landmarks: Number of landmarks, at least one
        seed: Trial seed; the environment stream of that seed is used

    Returns:
        The generated Environment
    """
    if n_landmarks < 1:
        raise InvalidInputError("n_landmarks must be at least 1")
    bounds = bounds_array(bounds)
    rng = trial_streams(seed).environment
    positions = rng.uniform(bounds[:, 0], bounds[:, 1], size=(n_landmarks, 2))
    logger.debug(f"Generated {n_landmarks} landmarks from seed {seed}")
    return Environment(bounds=bounds, landmarks_true=LandmarkSet(positions), seed=int(seed))
