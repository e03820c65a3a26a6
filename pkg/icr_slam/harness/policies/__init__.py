"""
Control policies compared by the simulation harness.
"""

from icr_slam.harness.policies.base import (
    BasePolicy,
    LqrWeights,
    PolicyRegistry,
    PolicySettings,
    policy_registry,
)
from icr_slam.harness.policies import random_policy, icr_policies

__all__ = [
    "BasePolicy",
    "LqrWeights",
    "PolicyRegistry",
    "PolicySettings",
    "policy_registry",
    "random_policy",
    "icr_policies",
]
