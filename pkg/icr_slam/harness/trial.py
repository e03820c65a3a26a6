"""
The replanning execution loop of one simulation trial.

Each planning phase the policy plans from the current posterior, then for
K steps: the control is applied to the true robot with sampled process
noise, visible landmarks are measured, and the EKF runs predict and update.
Metrics are recorded after initialization and after every step.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd

from icr_slam.dynamics.motion import ProcessNoiseModel, sample_noise, step
from icr_slam.errors import InvalidInputError, NumericalError
from icr_slam.estimation.ekf import (
    initial_belief,
    landmark_means,
    landmark_sigma,
    predict,
    reconstruct_measurement,
    update,
)
from icr_slam.harness.environment import Environment
from icr_slam.harness.metrics import METRIC_COLUMNS, metric_registry
from icr_slam.harness.policies import LqrWeights, PolicySettings, policy_registry
from icr_slam.harness.seeding import trial_streams
from icr_slam.planning.icr import DEFAULT_U_INIT, IcrConfig
from icr_slam.sensing.fov_sensing import SensorModel, sample_measurements

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrialConfig:
    """One policy run on one environment.

    Attributes:
        policy: Policy kind (random, icr_open_loop, icr_lqr)
        total_steps: Number of executed steps, a multiple of the horizon
        model: Motion and process noise model
        sensor: Sensor model
        icr: Planner settings including the horizon K and control bounds
        lqr: LQR weights
        seed: Trial seed the random streams are spawned from
        u_init: Planner initial control (2,) or sequence (K, 2)
        init_variance: Per-coordinate variance of the initial estimate
        init_robot_variance: Initial robot pose variance, init_variance if None
        init_heading_noise: Perturb the initial heading estimate too
        start_pose: True start pose; defaults to the environment center, θ = 0
    """
    policy: str
    total_steps: int
    model: ProcessNoiseModel
    sensor: SensorModel
    icr: IcrConfig
    lqr: LqrWeights
    seed: int
    u_init: np.ndarray = field(default_factory=lambda: np.array(DEFAULT_U_INIT))
    init_variance: float = 25.0
    init_robot_variance: Optional[float] = None
    init_heading_noise: bool = True
    start_pose: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.total_steps < 1 or self.total_steps % self.icr.horizon != 0:
            raise InvalidInputError(
                f"total_steps ({self.total_steps}) must be a positive multiple of the horizon ({self.icr.horizon})"
            )

    @property
    def horizon(self) -> int:
        return self.icr.horizon

    def u_init_sequence(self) -> np.ndarray:
        u_init = np.asarray(self.u_init, dtype=float)
        if u_init.shape == (2,):
            return np.tile(u_init, (self.horizon, 1))
        if u_init.shape != (self.horizon, 2):
            raise InvalidInputError(f"u_init must have shape (2,) or ({self.horizon}, 2)")
        return u_init


@dataclass
class TrialResult:
    """Metric series and trajectories of one trial.

    Attributes:
        policy: Policy kind
        seed: Trial seed
        metrics: One row per step 0..T with the metric columns
        x_true: True poses, (T+1, 3)
        x_est: Estimated poses, (T+1, 3)
        landmarks_true: True landmark positions, (n_l, 2)
        landmark_history: Landmark estimates after every step, (T+1, n_l, 2)
        landmark_sigma_history: Landmark marginal blocks (Σxx, Σxy, Σyy), (T+1, n_l, 3)
    """
    policy: str
    seed: int
    metrics: pd.DataFrame
    x_true: np.ndarray
    x_est: np.ndarray
    landmarks_true: np.ndarray
    landmark_history: np.ndarray
    landmark_sigma_history: np.ndarray

    @property
    def n_steps(self) -> int:
        return len(self.metrics) - 1

    @property
    def landmarks_est(self) -> np.ndarray:
        """Final landmark estimates, (n_l, 2)."""
        return self.landmark_history[-1]

    def to_frame(self) -> pd.DataFrame:
        """Rows in the metric file layout: step, policy, seed, metrics."""
        frame = self.metrics.copy()
        frame.insert(1, "policy", self.policy)
        frame.insert(2, "seed", self.seed)
        return frame

    def trajectory_frame(self) -> pd.DataFrame:
        """True and estimated pose per step."""
        return pd.DataFrame({
            "step": np.arange(self.x_true.shape[0]),
            "x_true": self.x_true[:, 0],
            "y_true": self.x_true[:, 1],
            "theta_true": self.x_true[:, 2],
            "x_est": self.x_est[:, 0],
            "y_est": self.x_est[:, 1],
            "theta_est": self.x_est[:, 2],
        })

    def landmark_frame(self) -> pd.DataFrame:
        """One row per step and landmark: truth, estimate and marginal covariance."""
        n_frames, n_landmarks, _ = self.landmark_history.shape
        truth = np.tile(self.landmarks_true, (n_frames, 1))
        means = self.landmark_history.reshape(-1, 2)
        blocks = self.landmark_sigma_history.reshape(-1, 3)
        return pd.DataFrame({
            "step": np.repeat(np.arange(n_frames), n_landmarks),
            "landmark": np.tile(np.arange(n_landmarks), n_frames),
            "x_true": truth[:, 0],
            "y_true": truth[:, 1],
            "x_est": means[:, 0],
            "y_est": means[:, 1],
            "cov_xx": blocks[:, 0],
            "cov_xy": blocks[:, 1],
            "cov_yy": blocks[:, 2],
        })


def run_trial(env: Environment, cfg: TrialConfig) -> TrialResult:
    """Run one policy on one environment.

    Args:
        env: Environment with the true landmarks
        cfg: Trial configuration

    Returns:
        TrialResult with total_steps + 1 metric rows

    Raises:
        NumericalError: Annotated with the step index where it occurred
    """
    streams = trial_streams(cfg.seed)
    landmarks_true = env.landmarks_true.positions
    settings = PolicySettings(
        model=cfg.model,
        sensor=cfg.sensor,
        icr=cfg.icr,
        lqr=cfg.lqr,
        u_init=cfg.u_init_sequence(),
    )
    policy = policy_registry.create(cfg.policy, settings, streams.controls)

    if cfg.start_pose is None:
        x_true = np.array([*env.center, 0.0])
    else:
        x_true = np.asarray(cfg.start_pose, dtype=float).reshape(3)
    belief = initial_belief(
        x_true,
        landmarks_true,
        cfg.init_variance,
        streams.initialization,
        include_heading=cfg.init_heading_noise,
        robot_variance=cfg.init_robot_variance,
    )

    n_steps = cfg.total_steps
    xs_true = np.empty((n_steps + 1, 3))
    xs_est = np.empty((n_steps + 1, 3))
    n_landmarks = landmarks_true.shape[0]
    lm_est = np.empty((n_steps + 1, n_landmarks, 2))
    lm_sigma = np.empty((n_steps + 1, n_landmarks, 3))
    rows = []

    def record(t: int) -> None:
        xs_true[t] = x_true
        xs_est[t] = belief.mean[:3]
        lm_est[t] = landmark_means(belief)
        lm_sigma[t] = landmark_sigma(belief).reshape(-1, 3)
        rows.append({"step": t, **metric_registry.run_all(belief, x_true, landmarks_true)})

    logger.info(f"Trial start: policy={cfg.policy} seed={cfg.seed} steps={n_steps}")
    record(0)
    t = 0
    try:
        for _ in range(n_steps // cfg.horizon):
            policy.begin_phase(belief)
            for k in range(cfg.horizon):
                u = policy.control(k, belief)
                x_true = step(x_true, u, sample_noise(cfg.model, streams.process), cfg.model)
                raw = sample_measurements(x_true, landmarks_true, cfg.sensor, streams.measurement)
                prior = predict(belief, u, cfg.model)
                belief = update(prior, reconstruct_measurement(prior, raw, cfg.sensor), cfg.sensor)
                t += 1
                record(t)
                logger.debug(f"step {t}: u={u} visible={[j for j, _ in raw]}")
    except NumericalError as e:
        annotated = e.with_step(t + 1)
        logger.error(f"Trial {cfg.policy}/{cfg.seed} failed: {annotated}")
        raise annotated from e

    metrics = pd.DataFrame(rows, columns=["step", *METRIC_COLUMNS])
    logger.info(
        f"Trial done: policy={cfg.policy} seed={cfg.seed} "
        f"lm_rmse={metrics['lm_rmse'].iloc[-1]:.3f} lm_entropy_avg={metrics['lm_entropy_avg'].iloc[-1]:.3f}"
    )
    return TrialResult(
        policy=cfg.policy,
        seed=cfg.seed,
        metrics=metrics,
        x_true=xs_true,
        x_est=xs_est,
        landmarks_true=np.array(landmarks_true, dtype=float),
        landmark_history=lm_est,
        landmark_sigma_history=lm_sigma,
    )
