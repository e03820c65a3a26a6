"""
Finite-difference verification of every analytic Jacobian in the pipeline.

Run from the command line with ``icr-slam --jacobian-check``.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np

from icr_slam.diagnostics.finite_difference import finite_difference_jacobian, relative_error
from icr_slam.dynamics.covariance import riccati_jacobians, riccati_step
from icr_slam.dynamics.motion import ProcessNoiseModel, jacobians, step
from icr_slam.geometry.fov import FovPolygon
from icr_slam.geometry.se2 import rotation_matrix
from icr_slam.sensing.fov_sensing import (
    SensorModel,
    body_frame_coords,
    body_frame_jacobian,
    info_block,
    info_block_gradient,
)

logger = logging.getLogger(__name__)

MOTION_TOLERANCE = 1e-5
SENSING_TOLERANCE = 1e-4


@dataclass
class CheckResult:
    name: str
    samples: int
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tolerance


def default_models():
    """Sensor and motion models with the evaluation defaults."""
    sensor = SensorModel(
        gamma=np.diag([0.1, 0.1]),
        kappa=10.0,
        fov=FovPolygon.isosceles_triangle(20.0, np.deg2rad(120.0)),
    )
    model = ProcessNoiseModel(W=np.diag([0.1, 0.1, 0.01]), tau=1.0)
    return sensor, model


def random_pose(rng: np.random.Generator) -> np.ndarray:
    return np.array([*rng.uniform(-10.0, 10.0, size=2), rng.uniform(-np.pi, np.pi)])


def random_control(rng: np.random.Generator) -> np.ndarray:
    # Every fourth sample gets a near-zero turn rate to exercise the sinc series
    omega = rng.uniform(-1.0, 1.0) if rng.random() > 0.25 else rng.uniform(-1e-5, 1e-5)
    return np.array([rng.uniform(0.0, 3.0), omega])


def landmark_near(x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """A landmark whose body-frame position falls in or around the FoV."""
    q = np.array([rng.uniform(-5.0, 30.0), rng.uniform(-25.0, 25.0)])
    return x[:2] + rotation_matrix(x[2]) @ q


def random_cov_vector(n_landmarks: int, rng: np.random.Generator) -> np.ndarray:
    triples = []
    for _ in range(n_landmarks):
        a = rng.normal(size=(2, 2)) * rng.uniform(0.5, 4.0)
        block = a @ a.T + rng.uniform(0.1, 1.0) * np.eye(2)
        triples.append([block[0, 0], block[0, 1], block[1, 1]])
    return np.asarray(triples).reshape(-1)


def _check_motion_e(rng, sensor, model) -> float:
    x, u = random_pose(rng), random_control(rng)
    numeric = finite_difference_jacobian(lambda xx: step(xx, u, np.zeros(3), model), x, angle_rows=[2])
    return relative_error(jacobians(x, u, model).E, numeric)


def _check_motion_b(rng, sensor, model) -> float:
    x, u = random_pose(rng), random_control(rng)
    numeric = finite_difference_jacobian(lambda uu: step(x, uu, np.zeros(3), model), u, angle_rows=[2])
    return relative_error(jacobians(x, u, model).B, numeric)


def _check_motion_d(rng, sensor, model) -> float:
    x, u = random_pose(rng), random_control(rng)
    numeric = finite_difference_jacobian(lambda w: step(x, u, w, model), np.zeros(3), angle_rows=[2])
    return relative_error(jacobians(x, u, model).D, numeric)


def _check_body_frame(rng, sensor, model) -> float:
    x = random_pose(rng)
    y = landmark_near(x, rng)
    numeric = finite_difference_jacobian(lambda xx: body_frame_coords(xx, y), x)
    return relative_error(body_frame_jacobian(x, y), numeric)


def _check_info_block(rng, sensor, model) -> float:
    x = random_pose(rng)
    y = landmark_near(x, rng)
    numeric = finite_difference_jacobian(lambda xx: info_block(xx, y, sensor), x)
    analytic = info_block_gradient(x, y, sensor).reshape(3, 4).T
    return relative_error(analytic, numeric)


def _riccati_sample(rng):
    x_next = random_pose(rng)
    landmarks = np.stack([landmark_near(x_next, rng) for _ in range(3)])
    return x_next, landmarks, random_cov_vector(3, rng)


def _check_riccati_f(rng, sensor, model) -> float:
    x_next, landmarks, sigma = _riccati_sample(rng)
    numeric = finite_difference_jacobian(lambda s: riccati_step(s, x_next, landmarks, sensor), sigma)
    return relative_error(riccati_jacobians(sigma, x_next, landmarks, sensor).F_dense(), numeric)


def _check_riccati_g(rng, sensor, model) -> float:
    x_next, landmarks, sigma = _riccati_sample(rng)
    numeric = finite_difference_jacobian(lambda xx: riccati_step(sigma, xx, landmarks, sensor), x_next)
    return relative_error(riccati_jacobians(sigma, x_next, landmarks, sensor).G, numeric)


CHECKS: Dict[str, tuple] = {
    "motion_E": (_check_motion_e, MOTION_TOLERANCE),
    "motion_B": (_check_motion_b, MOTION_TOLERANCE),
    "motion_D": (_check_motion_d, MOTION_TOLERANCE),
    "body_frame_jacobian": (_check_body_frame, SENSING_TOLERANCE),
    "info_block_gradient": (_check_info_block, SENSING_TOLERANCE),
    "riccati_F": (_check_riccati_f, SENSING_TOLERANCE),
    "riccati_G": (_check_riccati_g, SENSING_TOLERANCE),
}


def run_check(
    name: str,
    check: Callable,
    tolerance: float,
    n_samples: int,
    rng: np.random.Generator,
    sensor: SensorModel,
    model: ProcessNoiseModel,
) -> CheckResult:
    errors = [check(rng, sensor, model) for _ in range(n_samples)]
    result = CheckResult(name=name, samples=n_samples, max_error=max(errors), tolerance=tolerance)
    level = logging.INFO if result.passed else logging.ERROR
    logger.log(level, f"{name}: max relative error {result.max_error:.2e} (tolerance {tolerance:.0e})")
    return result


def run_checks(
    n_samples: int = 100,
    seed: int = 0,
    sensor: Optional[SensorModel] = None,
    model: Optional[ProcessNoiseModel] = None,
) -> List[CheckResult]:
    """Compare every analytic Jacobian with central differences.

    Args:
        n_samples: Random samples per Jacobian
        seed: Seed of the sampling stream
        sensor: Sensor model, evaluation defaults if omitted
        model: Motion model, evaluation defaults if omitted

    Returns:
        One CheckResult per Jacobian
    """
    default_sensor, default_model = default_models()
    sensor = sensor or default_sensor
    model = model or default_model
    rng = np.random.default_rng(seed)
    return [
        run_check(name, check, tolerance, n_samples, rng, sensor, model)
        for name, (check, tolerance) in CHECKS.items()
    ]
