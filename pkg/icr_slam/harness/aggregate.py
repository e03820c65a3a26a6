"""
Cross-trial aggregation of metric series.
"""

from typing import Sequence

import pandas as pd

from icr_slam.errors import InvalidInputError
from icr_slam.harness.metrics import METRIC_COLUMNS
from icr_slam.harness.trial import TrialResult


def aggregate(results: Sequence[TrialResult]) -> pd.DataFrame:
    """Per-step mean and population standard deviation across trials.

    Args:
        results: Trial results with equal series lengths

    Returns:
        DataFrame with a ``step`` column followed by ``<metric>_mean`` and
        ``<metric>_std`` for every metric

    Raises:
        InvalidInputError: If ``results`` is empty or lengths differ
    """
    if not results:
        raise InvalidInputError("cannot aggregate an empty list of trial results")
    lengths = {len(r.metrics) for r in results}
    if len(lengths) != 1:
        raise InvalidInputError(f"trial series lengths differ: {sorted(lengths)}")

    stacked = pd.concat([r.metrics for r in results], ignore_index=True)
    grouped = stacked.groupby("step", sort=True)[list(METRIC_COLUMNS)]
    mean = grouped.mean().add_suffix("_mean")
    std = grouped.std(ddof=0).add_suffix("_std")

    columns = []
    for name in METRIC_COLUMNS:
        columns += [f"{name}_mean", f"{name}_std"]
    return pd.concat([mean, std], axis=1)[columns].reset_index()
