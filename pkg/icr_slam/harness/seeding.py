"""
Per-trial random streams.

Every trial owns one integer seed derived from (master seed, trial index).
From it five independent generators are spawned so that the environment,
the initial belief, the process noise, the measurement noise and the
random-policy controls never share a stream. All policies run on the same
trial therefore see the same environment and the same noise draws.
"""

from typing import NamedTuple

import numpy as np


class TrialStreams(NamedTuple):
    environment: np.random.Generator
    initialization: np.random.Generator
    process: np.random.Generator
    measurement: np.random.Generator
    controls: np.random.Generator


def trial_seed(master_seed: int, trial_index: int) -> int:
    """Deterministic 32-bit seed of one trial."""
    state = np.random.SeedSequence([int(master_seed), int(trial_index)]).generate_state(1)
    return int(state[0])


def trial_streams(seed: int) -> TrialStreams:
    """Spawn the five independent generators of a trial seed."""
    children = np.random.SeedSequence(int(seed)).spawn(len(TrialStreams._fields))
    return TrialStreams(*(np.random.default_rng(child) for child in children))
