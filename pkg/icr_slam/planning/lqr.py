"""
Closed-loop regulation around an iCR nominal trajectory.

The joint error state s = (x̃, σ̃) evolves linearly,

    sₖ₊₁ = 𝒜ₖ sₖ + ℬₖ ũₖ + 𝒟ₖ wₖ,
    𝒜 = [[E, 0], [G E, F]],  ℬ = [[B], [G B]],  𝒟 = [[D], [G D]],

with stage cost sᵀ𝒬s + bᵀs + ũᵀRũ. Because of the linear term the optimal
policy is affine, ũ = L*s + ε*, and the value function is
V(s) = sᵀPs + dᵀs + δ.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from icr_slam.dynamics.covariance import TRACE_WEIGHTS, riccati_jacobians
from icr_slam.dynamics.motion import ControlBounds, ProcessNoiseModel, jacobians
from icr_slam.errors import InvalidInputError, NumericalError
from icr_slam.geometry.se2 import PoseLike, pose_vector, wrap_angle
from icr_slam.linalg import is_psd, is_spd, symmetrize
from icr_slam.planning.icr import OpenLoopPlan
from icr_slam.sensing.fov_sensing import SensorModel, landmark_array

logger = logging.getLogger(__name__)

# Asymmetry in P above this is logged before symmetrization
SYMMETRY_TOLERANCE = 1e-10


@dataclass
class AugmentedLinearization:
    """Per-step system matrices 𝒜ₖ (K, n_s, n_s), ℬₖ (K, n_s, m), 𝒟ₖ (K, n_s, n_w)."""
    A: np.ndarray
    B: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        self.B = np.asarray(self.B, dtype=float)
        self.D = np.asarray(self.D, dtype=float)
        if self.A.ndim != 3 or self.A.shape[1] != self.A.shape[2]:
            raise InvalidInputError("A must have shape (K, n_s, n_s)")
        horizon, n_s = self.A.shape[:2]
        if self.B.shape[:2] != (horizon, n_s) or self.D.shape[:2] != (horizon, n_s):
            raise InvalidInputError("B and D must have shapes (K, n_s, m) and (K, n_s, n_w)")

    @property
    def horizon(self) -> int:
        return self.A.shape[0]


@dataclass
class CostQuadratics:
    """Quadratic weights 𝒬ₖ (K+1, n_s, n_s), linear terms bₖ (K+1, n_s), Rₖ (K, m, m)."""
    Q: np.ndarray
    b: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        self.Q = np.asarray(self.Q, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        self.R = np.asarray(self.R, dtype=float)
        for k, q in enumerate(self.Q):
            if not is_psd(q, tol=1e-9):
                raise InvalidInputError(f"Q[{k}] must be symmetric positive semidefinite")
        for k, r in enumerate(self.R):
            if not is_spd(r):
                raise InvalidInputError(f"R[{k}] must be symmetric positive definite")


@dataclass
class LqrPolicy:
    """Affine time-varying feedback and its value function.

    Attributes:
        L: Gains L*ₖ, shape (K, m, n_s)
        eps: Offsets ε*ₖ, shape (K, m)
        P: Quadratic value terms P₀..P_K, shape (K+1, n_s, n_s)
        d: Linear value terms d₀..d_K, shape (K+1, n_s)
        delta: Constant value terms δ₀..δ_K, shape (K+1,)
    """
    L: np.ndarray
    eps: np.ndarray
    P: np.ndarray
    d: np.ndarray
    delta: np.ndarray

    @property
    def horizon(self) -> int:
        return self.L.shape[0]

    def value(self, s0: np.ndarray, k: int = 0) -> float:
        """Optimal expected cost-to-go sᵀPₖs + dₖᵀs + δₖ."""
        s0 = np.asarray(s0, dtype=float)
        return float(s0 @ self.P[k] @ s0 + self.d[k] @ s0 + self.delta[k])


def linearize(
    plan: OpenLoopPlan,
    landmarks_hat,
    sensor: SensorModel,
    model: ProcessNoiseModel,
) -> AugmentedLinearization:
    """Assemble 𝒜ₖ, ℬₖ, 𝒟ₖ along the nominal trajectory.

    E, B, D are taken at (x̄ₖ, ūₖ, 0) and F, G at (σ̄ₖ, x̄ₖ₊₁).
    """
    landmarks_hat = landmark_array(landmarks_hat)
    horizon = plan.horizon
    n_sigma = plan.sigma_nom.shape[1]
    n_s = 3 + n_sigma
    a = np.zeros((horizon, n_s, n_s))
    b = np.zeros((horizon, n_s, 2))
    d = np.zeros((horizon, n_s, 3))
    for k in range(horizon):
        motion = jacobians(plan.x_nom[k], plan.u_nom[k], model)
        riccati = riccati_jacobians(plan.sigma_nom[k], plan.x_nom[k + 1], landmarks_hat, sensor)
        a[k, :3, :3] = motion.E
        a[k, 3:, :3] = riccati.G @ motion.E
        a[k, 3:, 3:] = riccati.F_dense()
        b[k, :3] = motion.B
        b[k, 3:] = riccati.G @ motion.B
        d[k, :3] = motion.D
        d[k, 3:] = riccati.G @ motion.D
    return AugmentedLinearization(A=a, B=b, D=d)


def cost_expansion(plan: OpenLoopPlan, q1, q2_pattern, r) -> CostQuadratics:
    """Quadratic/linear cost terms for the trace objective.

    The trace cost has zero Hessian and gradient b̄ = (η, …, η) with
    η = (1, 0, 1), so 𝒬ₖ = blockdiag(Q⁽¹⁾, I ⊗ Q⁽²⁾) and bₖ = (0, b̄).

    Args:
        plan: Nominal trajectory
        q1: Pose error weight, 3×3
        q2_pattern: Per-landmark covariance error weight, 3×3 (Kronecker-repeated)
        r: Control weight, 2×2

    Returns:
        CostQuadratics for steps 0..K
    """
    horizon = plan.horizon
    n_l = plan.n_landmarks
    q_stage = scipy.linalg.block_diag(
        np.asarray(q1, dtype=float),
        np.kron(np.eye(n_l), np.asarray(q2_pattern, dtype=float)),
    )
    b_stage = np.concatenate([np.zeros(3), np.tile(TRACE_WEIGHTS, n_l)])
    return CostQuadratics(
        Q=np.repeat(q_stage[None], horizon + 1, axis=0),
        b=np.repeat(b_stage[None], horizon + 1, axis=0),
        R=np.repeat(np.asarray(r, dtype=float)[None], horizon, axis=0),
    )


def backward_pass(lin: AugmentedLinearization, costs: CostQuadratics, w) -> LqrPolicy:
    """Backward Riccati recursion for the affine LQR problem.

    Args:
        lin: Linearized dynamics for k = 0..K−1
        costs: Cost terms for k = 0..K
        w: Process noise covariance, a single matrix or one per step

    Returns:
        The LqrPolicy

    Raises:
        NumericalError: If R + ℬᵀPℬ is singular at some step
    """
    horizon = lin.horizon
    if horizon < 1:
        raise InvalidInputError("horizon must be at least 1")
    n_s = lin.A.shape[1]
    m = lin.B.shape[2]
    w = np.asarray(w, dtype=float)
    if w.ndim == 2:
        w = np.repeat(w[None], horizon, axis=0)

    gains = np.zeros((horizon, m, n_s))
    offsets = np.zeros((horizon, m))
    p_seq = np.zeros((horizon + 1, n_s, n_s))
    d_seq = np.zeros((horizon + 1, n_s))
    delta_seq = np.zeros(horizon + 1)

    p_seq[horizon] = costs.Q[horizon]
    d_seq[horizon] = costs.b[horizon]
    for k in range(horizon - 1, -1, -1):
        a, b, dk = lin.A[k], lin.B[k], lin.D[k]
        p_next, d_next = p_seq[k + 1], d_seq[k + 1]

        s_mat = symmetrize(costs.R[k] + b.T @ p_next @ b)
        try:
            factor = scipy.linalg.cho_factor(s_mat)
        except np.linalg.LinAlgError as e:
            logger.error(f"R + BᵀPB is not positive definite at step {k}")
            raise NumericalError(f"R + BᵀPB is singular: {e}", module="lqr_policy", step=k) from e

        bt_p_a = b.T @ p_next @ a
        bt_d = b.T @ d_next
        gains[k] = -scipy.linalg.cho_solve(factor, bt_p_a)
        offsets[k] = -0.5 * scipy.linalg.cho_solve(factor, bt_d)

        p_k = costs.Q[k] + a.T @ p_next @ a + bt_p_a.T @ gains[k]
        asym = np.max(np.abs(p_k - p_k.T))
        if asym > SYMMETRY_TOLERANCE:
            logger.debug(f"P[{k}] asymmetry {asym:.2e} before symmetrization")
        p_seq[k] = symmetrize(p_k)
        d_seq[k] = costs.b[k] + a.T @ d_next + bt_p_a.T @ (2.0 * offsets[k])
        delta_seq[k] = (delta_seq[k + 1] + np.trace(dk.T @ p_next @ dk @ w[k])
                        + 0.5 * bt_d @ offsets[k])

    return LqrPolicy(L=gains, eps=offsets, P=p_seq, d=d_seq, delta=delta_seq)


def value(policy: LqrPolicy, s0) -> float:
    """V₀(s₀) = s₀ᵀP₀s₀ + d₀ᵀs₀ + δ₀, the optimal expected cost from s₀."""
    return policy.value(s0, k=0)


def error_state(x: PoseLike, sigma: np.ndarray, x_nom: np.ndarray, sigma_nom: np.ndarray) -> np.ndarray:
    """s = (x − x̄ with wrapped heading error, σ − σ̄)."""
    x_err = pose_vector(x) - x_nom
    x_err[2] = wrap_angle(x_err[2])
    return np.concatenate([x_err, np.asarray(sigma, dtype=float) - sigma_nom])


def apply_policy(
    k: int,
    x: PoseLike,
    sigma: np.ndarray,
    plan: OpenLoopPlan,
    policy: LqrPolicy,
    bounds: Optional[ControlBounds] = None,
) -> np.ndarray:
    """u = ūₖ + L*ₖ sₖ + ε*ₖ, clamped to the control bounds."""
    if not 0 <= k < policy.horizon:
        raise InvalidInputError(f"step {k} outside the policy horizon {policy.horizon}")
    s = error_state(x, sigma, plan.x_nom[k], plan.sigma_nom[k])
    u = plan.u_nom[k] + policy.L[k] @ s + policy.eps[k]
    return bounds.clamp(u) if bounds is not None else u


def synthesize(
    plan: OpenLoopPlan,
    landmarks_hat,
    sensor: SensorModel,
    model: ProcessNoiseModel,
    q1,
    q2_pattern,
    r,
) -> LqrPolicy:
    """Linearize, expand the cost and run the backward pass."""
    lin = linearize(plan, landmarks_hat, sensor, model)
    costs = cost_expansion(plan, q1, q2_pattern, r)
    return backward_pass(lin, costs, model.W)
