"""
Policies built on the iCR planner.

Both plan once per phase from the posterior belief: the planner starts at
the estimated pose, uses the estimated landmarks as the frozen ŷ and the
landmark marginal blocks as σ₀. Every phase executes the whole horizon, so
a warm start reuses the previous phase's optimized sequence as it is.
"""

import logging
from typing import Optional

import numpy as np

from icr_slam.estimation.ekf import JointBelief, landmark_means, landmark_sigma, robot_pose
from icr_slam.harness.policies.base import BasePolicy, policy_registry
from icr_slam.planning.icr import OpenLoopPlan, optimize
from icr_slam.planning.lqr import LqrPolicy, apply_policy, synthesize

logger = logging.getLogger(__name__)


class IcrOpenLoopPolicy(BasePolicy):
    """Replays the optimized nominal controls ū₀..ū_{K−1} without feedback."""

    kind = "icr_open_loop"

    plan: Optional[OpenLoopPlan] = None

    def initial_controls(self) -> np.ndarray:
        """Starting point of the next phase's optimization."""
        if self.settings.icr.warm_start and self.plan is not None:
            return self.plan.u_nom.copy()
        return self.settings.u_init

    def _plan(self, belief: JointBelief) -> OpenLoopPlan:
        s = self.settings
        plan = optimize(
            robot_pose(belief),
            landmark_sigma(belief),
            self.initial_controls(),
            s.icr,
            landmark_means(belief),
            s.sensor,
            s.model,
        )
        if plan.cost_history:
            logger.debug(f"{self.kind}: planned cost {plan.cost_history[0]:.4f} -> {plan.cost:.4f}")
        return plan

    def begin_phase(self, belief: JointBelief) -> None:
        self.plan = self._plan(belief)

    def control(self, k: int, belief: JointBelief) -> np.ndarray:
        return self.plan.u_nom[k].copy()


class IcrLqrPolicy(IcrOpenLoopPolicy):
    """Regulates the iCR plan with the affine LQR feedback.

    The error state comes from the current EKF estimate: the estimated pose
    and the landmark marginal blocks.
    """

    kind = "icr_lqr"

    feedback: Optional[LqrPolicy] = None

    def begin_phase(self, belief: JointBelief) -> None:
        s = self.settings
        self.plan = self._plan(belief)
        self.feedback = synthesize(
            self.plan,
            landmark_means(belief),
            s.sensor,
            s.model,
            s.lqr.q1,
            s.lqr.q2_pattern,
            s.lqr.r,
        )

    def control(self, k: int, belief: JointBelief) -> np.ndarray:
        return apply_policy(
            k,
            robot_pose(belief),
            landmark_sigma(belief),
            self.plan,
            self.feedback,
            self.settings.bounds,
        )


policy_registry.register(IcrOpenLoopPolicy)
policy_registry.register(IcrLqrPolicy)
