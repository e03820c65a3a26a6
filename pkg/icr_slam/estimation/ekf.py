"""
Joint EKF over the robot pose and static landmark positions.

The stacked measurement vector holds one body-frame relative position per
landmark. Landmarks outside the field of view get the predicted
measurement q(x̂⁻, ŷ⁽ʲ⁾) in place of a reading, so their innovation is
exactly zero, and their noise V̄⁽ʲ⁾ = Γ / (1 − Φ(d)) is inflated by the
smooth visibility factor so the gain on those rows nearly vanishes.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.stats import chi2

from icr_slam.dynamics.motion import ProcessNoiseModel, jacobians, step
from icr_slam.errors import InvalidInputError, NumericalError
from icr_slam.geometry.se2 import PoseLike, pose_vector, rotation_matrix, wrap_angle
from icr_slam.linalg import clip_psd, is_symmetric
from icr_slam.sensing.fov_sensing import (
    SensorModel,
    body_frame_coords,
    body_frame_jacobian,
    landmark_array,
    measurement_noise,
)

logger = logging.getLogger(__name__)

# Most negative eigenvalue tolerated before a covariance is rejected
PSD_TOLERANCE = 1e-9


@dataclass
class JointBelief:
    """Gaussian belief over (x, y⁽¹⁾, …, y⁽ⁿˡ⁾).

    Attributes:
        mean: (3 + 2n_l)-vector, robot pose first
        cov: (3 + 2n_l)×(3 + 2n_l) symmetric PSD covariance
    """
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float).reshape(-1)
        self.cov = np.asarray(self.cov, dtype=float)
        n = self.mean.size
        if n < 5 or (n - 3) % 2 != 0:
            raise InvalidInputError("belief mean must have length 3 + 2·n_l with n_l >= 1")
        if self.cov.shape != (n, n):
            raise InvalidInputError(f"belief covariance must be {n}×{n}")
        if not np.all(np.isfinite(self.mean)) or not np.all(np.isfinite(self.cov)):
            raise InvalidInputError("belief contains non-finite values")
        if not is_symmetric(self.cov, 1e-10):
            raise InvalidInputError("belief covariance must be symmetric")
        if np.min(np.linalg.eigvalsh(self.cov)) < -PSD_TOLERANCE:
            raise InvalidInputError("belief covariance must be positive semidefinite")

    @property
    def n_landmarks(self) -> int:
        return (self.mean.size - 3) // 2

    def copy(self) -> "JointBelief":
        return JointBelief(mean=self.mean.copy(), cov=self.cov.copy())


def robot_pose(belief: JointBelief) -> np.ndarray:
    """Robot pose estimate x̂."""
    return belief.mean[:3].copy()


def landmark_means(belief: JointBelief) -> np.ndarray:
    """Landmark estimates ŷ as an (n_l, 2) array."""
    return belief.mean[3:].reshape(-1, 2).copy()


def landmark_blocks(belief: JointBelief) -> np.ndarray:
    """Marginal 2×2 covariance of every landmark, shape (n_l, 2, 2)."""
    n_l = belief.n_landmarks
    idx = 3 + 2 * np.arange(n_l)
    blocks = np.empty((n_l, 2, 2))
    for j, i in enumerate(idx):
        blocks[j] = belief.cov[i:i + 2, i:i + 2]
    return blocks


def landmark_sigma(belief: JointBelief) -> np.ndarray:
    """Planner covariance vector from the landmark diagonal blocks.

    Robot-landmark and landmark-landmark cross terms are discarded.
    """
    blocks = landmark_blocks(belief)
    return np.stack([blocks[:, 0, 0], 0.5 * (blocks[:, 0, 1] + blocks[:, 1, 0]), blocks[:, 1, 1]], axis=1).reshape(-1)


def initial_belief(
    x_true: PoseLike,
    landmarks_true,
    variance: float,
    rng: np.random.Generator,
    include_heading: bool = True,
    robot_variance: Optional[float] = None,
) -> JointBelief:
    """Ground truth perturbed by 𝒩(0, variance) per coordinate, with Σ₀ = variance·I.

    Args:
        x_true: True initial robot pose
        landmarks_true: True landmark positions
        variance: Per-coordinate prior variance
        rng: The caller's initialization stream
        include_heading: Perturb the heading as well as the positions
        robot_variance: Separate prior variance for the robot pose (defaults to ``variance``)

    Returns:
        The initial JointBelief
    """
    if robot_variance is None:
        robot_variance = variance
    if not variance > 0 or not robot_variance > 0:
        raise InvalidInputError("initial variances must be positive")
    truth = np.concatenate([pose_vector(x_true), landmark_array(landmarks_true).reshape(-1)])
    variances = np.full(truth.size, float(variance))
    variances[:3] = robot_variance
    noise = np.sqrt(variances) * rng.standard_normal(truth.size)
    if not include_heading:
        noise[2] = 0.0
    mean = truth + noise
    mean[2] = wrap_angle(mean[2])
    return JointBelief(mean=mean, cov=np.diag(variances))


def predict(belief: JointBelief, u, model: ProcessNoiseModel) -> JointBelief:
    """A priori step: robot propagated by f(x̂, u, 0), landmarks static.

    The covariance follows blockdiag(E, I) Σ blockdiag(E, I)ᵀ + blockdiag(W, 0).
    """
    x_hat = belief.mean[:3]
    motion = jacobians(x_hat, u, model)
    mean = belief.mean.copy()
    mean[:3] = step(x_hat, u, np.zeros(3), model)

    cov = belief.cov.copy()
    cov[:3, :] = motion.E @ cov[:3, :]
    cov[:, :3] = cov[:, :3] @ motion.E.T
    cov[:3, :3] += motion.D @ model.W @ motion.D.T
    return JointBelief(mean=mean, cov=clip_psd(cov))


def predicted_measurements(belief: JointBelief) -> np.ndarray:
    """h(x̂, ŷ): every landmark's body-frame position, stacked to 2n_l."""
    x_hat = belief.mean[:3]
    return np.concatenate([body_frame_coords(x_hat, y) for y in landmark_means(belief)])


def reconstruct_measurement(
    belief_prior: JointBelief,
    raw: Iterable[Tuple[int, Sequence[float]]],
    sensor: SensorModel,
) -> np.ndarray:
    """Fill unseen landmark slots with the predicted measurement.

    Args:
        belief_prior: A priori belief
        raw: (landmark index, 2-D measurement) pairs of visible landmarks
        sensor: Sensor model (accepted for interface symmetry with ``update``)

    Returns:
        The stacked 2n_l measurement vector
    """
    z = predicted_measurements(belief_prior)
    n_l = belief_prior.n_landmarks
    for j, reading in raw:
        if not 0 <= j < n_l:
            raise InvalidInputError(f"measurement index {j} outside 0..{n_l - 1}")
        z[2 * j:2 * j + 2] = np.asarray(reading, dtype=float).reshape(2)
    return z


def measurement_jacobian(belief: JointBelief) -> np.ndarray:
    """Stacked H = [∂q/∂x | blockdiag(Rᵀ(θ))] at the belief mean."""
    x_hat = belief.mean[:3]
    landmarks = landmark_means(belief)
    n_l = landmarks.shape[0]
    rot_t = rotation_matrix(x_hat[2]).T
    h = np.zeros((2 * n_l, 3 + 2 * n_l))
    for j, y in enumerate(landmarks):
        h[2 * j:2 * j + 2, :3] = body_frame_jacobian(x_hat, y)
        h[2 * j:2 * j + 2, 3 + 2 * j:5 + 2 * j] = rot_t
    return h


def update(belief_prior: JointBelief, z: np.ndarray, sensor: SensorModel) -> JointBelief:
    """A posteriori step with visibility-inflated noise and the Joseph form.

    Raises:
        NumericalError: If the innovation covariance cannot be factorized
    """
    z = np.asarray(z, dtype=float).reshape(-1)
    n_l = belief_prior.n_landmarks
    if z.size != 2 * n_l:
        raise InvalidInputError(f"measurement vector must have length {2 * n_l}")

    x_hat = belief_prior.mean[:3]
    landmarks = landmark_means(belief_prior)
    h_mat = measurement_jacobian(belief_prior)
    noise = scipy.linalg.block_diag(*[measurement_noise(x_hat, y, sensor) for y in landmarks])
    innovation = z - predicted_measurements(belief_prior)

    prior_cov = belief_prior.cov
    ph_t = prior_cov @ h_mat.T
    s_mat = 0.5 * ((h_mat @ ph_t + noise) + (h_mat @ ph_t + noise).T)
    try:
        gain = scipy.linalg.solve(s_mat, ph_t.T, assume_a="pos").T
    except (np.linalg.LinAlgError, ValueError) as e:
        logger.error(f"Innovation covariance is not invertible (min diag {np.min(np.diag(s_mat)):.3e})")
        raise NumericalError(f"innovation covariance is not invertible: {e}", module="ekf_slam") from e

    mean = belief_prior.mean + gain @ innovation
    if not -np.pi <= mean[2] < np.pi:
        mean[2] = wrap_angle(mean[2])

    i_kh = np.eye(prior_cov.shape[0]) - gain @ h_mat
    cov = i_kh @ prior_cov @ i_kh.T + gain @ noise @ gain.T
    return JointBelief(mean=mean, cov=clip_psd(cov))


def gaussian_entropy(cov: np.ndarray) -> float:
    """½ ln((2πe)ⁿ det Σ); −inf when det Σ is not positive."""
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    sign, logdet = np.linalg.slogdet(cov)
    if sign <= 0:
        return float("-inf")
    n = cov.shape[0]
    return 0.5 * (n * np.log(2.0 * np.pi * np.e) + logdet)


def entropies(belief: JointBelief) -> Tuple[float, List[float], float]:
    """Robot pose, per-landmark and joint differential entropies.

    Returns:
        Tuple (robot_pose_entropy, per_landmark_entropies, joint_entropy)
    """
    robot = gaussian_entropy(belief.cov[:3, :3])
    per_landmark = [gaussian_entropy(block) for block in landmark_blocks(belief)]
    joint = gaussian_entropy(belief.cov)
    return robot, per_landmark, joint


def nees(belief: JointBelief, landmarks_true) -> np.ndarray:
    """Per-landmark normalized estimation error squared eᵀΣ⁻¹e."""
    errors = landmark_means(belief) - landmark_array(landmarks_true)
    blocks = landmark_blocks(belief)
    return np.array([e @ np.linalg.solve(block, e) for e, block in zip(errors, blocks)])


def nees_bounds(dof: int, n_runs: int, confidence: float = 0.95) -> Tuple[float, float]:
    """Two-sided chi-square band for a NEES averaged over ``n_runs`` runs."""
    tail = 0.5 * (1.0 - confidence)
    total = dof * n_runs
    return float(chi2.ppf(tail, total) / n_runs), float(chi2.ppf(1.0 - tail, total) / n_runs)
