"""
Control policy interface and registry.

A policy is instantiated once per trial. At the start of every planning
phase ``begin_phase`` receives the current posterior belief; ``control``
is then queried once per step of the phase.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, List, Type

import numpy as np

from icr_slam.dynamics.motion import ProcessNoiseModel
from icr_slam.errors import InvalidInputError
from icr_slam.estimation.ekf import JointBelief
from icr_slam.planning.icr import IcrConfig
from icr_slam.sensing.fov_sensing import SensorModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LqrWeights:
    """Stage weights Q⁽¹⁾ (3×3), per-landmark Q⁽²⁾ pattern (3×3) and R (2×2)."""
    q1: np.ndarray
    q2_pattern: np.ndarray
    r: np.ndarray


@dataclass(frozen=True)
class PolicySettings:
    """Everything a policy may need to plan."""
    model: ProcessNoiseModel
    sensor: SensorModel
    icr: IcrConfig
    lqr: LqrWeights
    u_init: np.ndarray

    @property
    def bounds(self):
        return self.icr.bounds


class BasePolicy(ABC):
    """Base class for all policies.

    Attributes:
        kind: Registry key, also written to the ``policy`` column
    """

    kind: str = ""

    def __init__(self, settings: PolicySettings, rng: np.random.Generator):
        """Initialize the policy.

        Args:
            settings: Models and planner parameters
            rng: The trial's control stream
        """
        self.settings = settings
        self.rng = rng

    @abstractmethod
    def begin_phase(self, belief: JointBelief) -> None:
        """Prepare the controls of the next planning phase."""

    @abstractmethod
    def control(self, k: int, belief: JointBelief) -> np.ndarray:
        """Control for step ``k`` of the current phase given the latest belief."""


class PolicyRegistry:
    """Registry of policy classes keyed by kind."""

    def __init__(self):
        self._policies: Dict[str, Type[BasePolicy]] = {}

    def register(self, policy_cls: Type[BasePolicy]) -> Type[BasePolicy]:
        """Register a policy class.

        Args:
            policy_cls: Subclass of BasePolicy with a non-empty ``kind``

        Returns:
            The class itself
        """
        if not policy_cls.kind:
            raise InvalidInputError(f"{policy_cls.__name__} has no policy kind")
        self._policies[policy_cls.kind] = policy_cls
        logger.debug(f"Registered policy: {policy_cls.kind}")
        return policy_cls

    def create(self, kind: str, settings: PolicySettings, rng: np.random.Generator) -> BasePolicy:
        """Instantiate the policy registered under ``kind``.

        Raises:
            InvalidInputError: If no such policy is registered
        """
        policy_cls = self._policies.get(kind)
        if policy_cls is None:
            raise InvalidInputError(f"Unknown policy '{kind}'; available: {', '.join(self.get_available_policies())}")
        return policy_cls(settings, rng)

    def get_available_policies(self) -> List[str]:
        return list(self._policies.keys())


# Global registry instance
policy_registry = PolicyRegistry()
