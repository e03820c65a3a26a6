"""
Baseline policy drawing i.i.d. uniform controls inside the control bounds.
"""

import numpy as np

from icr_slam.estimation.ekf import JointBelief
from icr_slam.harness.policies.base import BasePolicy, policy_registry


class RandomPolicy(BasePolicy):
    """Resamples a control every step; ignores the belief."""

    kind = "random"

    def begin_phase(self, belief: JointBelief) -> None:
        pass

    def control(self, k: int, belief: JointBelief) -> np.ndarray:
        bounds = self.settings.bounds
        return self.rng.uniform(bounds.lower, bounds.upper)


policy_registry.register(RandomPolicy)
