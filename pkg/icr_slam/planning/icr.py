"""
Open-loop informative trajectory optimization (iterative covariance regulation).

The control sequence U = [u₀, …, u_{K−1}] is improved by gradient descent on

    J(U) = Σₖ₌₀^{K} tr(σ̄ₖ)

subject to the noiseless motion model x̄ₖ₊₁ = f(x̄ₖ, ūₖ, 0) and the vector
Riccati update σ̄ₖ₊₁ = g(σ̄ₖ, x̄ₖ₊₁). The gradient is computed exactly by a
backward adjoint sweep through both trajectories.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from icr_slam.dynamics.covariance import (
    TRACE_WEIGHTS,
    block_trace,
    check_cov_vector,
    riccati_jacobians,
    riccati_step,
)
from icr_slam.dynamics.motion import ControlBounds, ProcessNoiseModel, jacobians, step
from icr_slam.errors import InvalidInputError
from icr_slam.geometry.se2 import PoseLike, pose_vector
from icr_slam.sensing.fov_sensing import SensorModel, landmark_array

logger = logging.getLogger(__name__)

# Upper limit on step halvings per iteration in backtracking mode
MAX_HALVINGS = 30

# Straight ahead at half the default speed bound
DEFAULT_U_INIT = (1.5, 0.0)


@dataclass(frozen=True)
class IcrConfig:
    """Horizon, iteration count, per-channel step sizes and control bounds.

    With ``warm_start`` a policy seeds each phase after the first with the
    controls it optimized in the previous phase instead of ``u_init``.
    """
    horizon: int = 5
    iterations: int = 10
    alpha: tuple = (0.005, 0.0005)
    bounds: ControlBounds = field(default_factory=ControlBounds)
    backtracking: bool = False
    warm_start: bool = True

    def __post_init__(self):
        if self.horizon < 1:
            raise InvalidInputError("horizon must be at least 1")
        if self.iterations < 0:
            raise InvalidInputError("iterations must be non-negative")
        alpha = tuple(float(a) for a in np.asarray(self.alpha, dtype=float).reshape(-1))
        if len(alpha) != 2 or min(alpha) <= 0:
            raise InvalidInputError("alpha must hold two positive step sizes")
        object.__setattr__(self, "alpha", alpha)

    @property
    def alpha_matrix(self) -> np.ndarray:
        return np.diag(self.alpha)


@dataclass
class OpenLoopPlan:
    """Nominal trajectory produced by a rollout.

    Attributes:
        x_nom: Poses x̄₀..x̄_K, shape (K+1, 3)
        u_nom: Controls ū₀..ū_{K−1}, shape (K, 2)
        sigma_nom: Covariance vectors σ̄₀..σ̄_K, shape (K+1, 3·n_l)
        cost: Trace cost J
        cost_history: Cost after each optimizer iteration (initial cost first)
    """
    x_nom: np.ndarray
    u_nom: np.ndarray
    sigma_nom: np.ndarray
    cost: float
    cost_history: List[float] = field(default_factory=list)

    @property
    def horizon(self) -> int:
        return self.u_nom.shape[0]

    @property
    def n_landmarks(self) -> int:
        return self.sigma_nom.shape[1] // 3


def _control_sequence(u_seq) -> np.ndarray:
    u_seq = np.asarray(u_seq, dtype=float)
    if u_seq.ndim == 1:
        u_seq = u_seq.reshape(-1, 2)
    if u_seq.ndim != 2 or u_seq.shape[1] != 2 or u_seq.shape[0] < 1:
        raise InvalidInputError("control sequence must have shape (K, 2) with K >= 1")
    return u_seq


def trace_cost(plan: OpenLoopPlan) -> float:
    """J = Σₖ₌₀^{K−1} tr(σ̄ₖ) + tr(σ̄_K)."""
    return float(sum(block_trace(sigma) for sigma in plan.sigma_nom))


def rollout(
    x0: PoseLike,
    sigma0: np.ndarray,
    u_seq,
    landmarks_hat,
    sensor: SensorModel,
    model: ProcessNoiseModel,
) -> OpenLoopPlan:
    """Deterministic (w = 0) pose and covariance trajectory under ``u_seq``."""
    u_seq = _control_sequence(u_seq)
    sigma0 = check_cov_vector(sigma0)
    landmarks_hat = landmark_array(landmarks_hat)
    horizon = u_seq.shape[0]

    xs = np.empty((horizon + 1, 3))
    sigmas = np.empty((horizon + 1, sigma0.size))
    xs[0] = pose_vector(x0)
    sigmas[0] = sigma0
    zero_noise = np.zeros(3)
    for k in range(horizon):
        xs[k + 1] = step(xs[k], u_seq[k], zero_noise, model)
        sigmas[k + 1] = riccati_step(sigmas[k], xs[k + 1], landmarks_hat, sensor)

    plan = OpenLoopPlan(x_nom=xs, u_nom=u_seq.copy(), sigma_nom=sigmas, cost=0.0)
    plan.cost = trace_cost(plan)
    return plan


def gradient(
    u_seq,
    x0: PoseLike,
    sigma0: np.ndarray,
    landmarks_hat,
    sensor: SensorModel,
    model: ProcessNoiseModel,
    plan: Optional[OpenLoopPlan] = None,
) -> np.ndarray:
    """Exact ∂J/∂U by a backward adjoint sweep.

    Args:
        u_seq: Controls, shape (K, 2)
        x0: Initial pose
        sigma0: Initial covariance vector
        landmarks_hat: Frozen landmark estimates used inside M̄
        sensor: Sensor model
        model: Motion model
        plan: Rollout of ``u_seq`` if already available

    Returns:
        Gradient with the same shape as the control sequence, (K, 2)
    """
    u_seq = _control_sequence(u_seq)
    landmarks_hat = landmark_array(landmarks_hat)
    if plan is None:
        plan = rollout(x0, sigma0, u_seq, landmarks_hat, sensor, model)
    horizon = u_seq.shape[0]
    n_l = plan.n_landmarks
    b = np.tile(TRACE_WEIGHTS, n_l)

    motion = [jacobians(plan.x_nom[k], u_seq[k], model) for k in range(horizon)]
    riccati = [
        riccati_jacobians(plan.sigma_nom[k], plan.x_nom[k + 1], landmarks_hat, sensor)
        for k in range(horizon)
    ]

    grad = np.empty((horizon, 2))
    lam_sigma = b.copy()
    lam_x = riccati[horizon - 1].G.T @ lam_sigma
    for k in range(horizon - 1, -1, -1):
        grad[k] = motion[k].B.T @ lam_x
        lam_sigma = b + riccati[k].apply_F_transpose(lam_sigma)
        if k >= 1:
            lam_x = motion[k].E.T @ lam_x + riccati[k - 1].G.T @ lam_sigma
    return grad


def optimize(
    x0: PoseLike,
    sigma0: np.ndarray,
    u_init,
    cfg: IcrConfig,
    landmarks_hat,
    sensor: SensorModel,
    model: ProcessNoiseModel,
) -> OpenLoopPlan:
    """Projected gradient descent U ← clamp(U − ∂J/∂U · diag(α)).

    With ``cfg.backtracking`` the step is halved until the cost does not
    increase; if no halving succeeds the iterate is kept. Only the updated
    iterates are clamped, so zero iterations return ``u_init`` as given.

    Returns:
        Rollout of the final control sequence with its cost history
    """
    u_seq = _control_sequence(u_init)
    if u_seq.shape[0] != cfg.horizon:
        raise InvalidInputError(f"initial control sequence has {u_seq.shape[0]} steps, expected {cfg.horizon}")
    landmarks_hat = landmark_array(landmarks_hat)
    alpha = np.asarray(cfg.alpha)

    plan = rollout(x0, sigma0, u_seq, landmarks_hat, sensor, model)
    history = [plan.cost]
    for iteration in range(cfg.iterations):
        grad = gradient(u_seq, x0, sigma0, landmarks_hat, sensor, model, plan=plan)
        scale = 1.0
        candidate_plan = None
        for _ in range(MAX_HALVINGS if cfg.backtracking else 1):
            candidate = cfg.bounds.clamp(u_seq - scale * grad * alpha)
            candidate_plan = rollout(x0, sigma0, candidate, landmarks_hat, sensor, model)
            if not cfg.backtracking or candidate_plan.cost <= plan.cost:
                break
            scale *= 0.5
        else:
            logger.debug(f"Backtracking exhausted at iteration {iteration}; keeping current controls")
            candidate_plan = plan

        plan = candidate_plan
        u_seq = plan.u_nom
        history.append(plan.cost)
        logger.debug(f"iCR iteration {iteration}: cost={plan.cost:.6f} step_scale={scale:g}")

    plan.cost_history = history
    return plan
