"""
Informative trajectory planning: open-loop iCR and closed-loop affine LQR.
"""

from icr_slam.planning.icr import IcrConfig, OpenLoopPlan, gradient, optimize, rollout, trace_cost
from icr_slam.planning.lqr import (
    AugmentedLinearization,
    CostQuadratics,
    LqrPolicy,
    apply_policy,
    backward_pass,
    cost_expansion,
    linearize,
    synthesize,
    value,
)

__all__ = [
    "IcrConfig",
    "OpenLoopPlan",
    "gradient",
    "optimize",
    "rollout",
    "trace_cost",
    "AugmentedLinearization",
    "CostQuadratics",
    "LqrPolicy",
    "apply_policy",
    "backward_pass",
    "cost_expansion",
    "linearize",
    "synthesize",
    "value",
]
