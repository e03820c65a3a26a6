"""
Simulation harness: environments, policies, the trial loop and metrics.
"""

from icr_slam.harness.environment import Environment, generate_environment
from icr_slam.harness.seeding import TrialStreams, trial_seed, trial_streams
from icr_slam.harness.trial import TrialConfig, TrialResult, run_trial
from icr_slam.harness.aggregate import aggregate

__all__ = [
    "Environment",
    "generate_environment",
    "TrialStreams",
    "trial_seed",
    "trial_streams",
    "TrialConfig",
    "TrialResult",
    "run_trial",
    "aggregate",
]
