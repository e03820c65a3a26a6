"""
Experiment orchestration: configuration files, trial fan-out and output.

Output layout under the output directory::

    trials/<policy>_seed<seed>.csv   one metric file per (trial, policy)
    summary.csv                      per-step mean/std per policy
    manifest.json                    resolved config, version and trial seeds
"""

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import ValidationError

from icr_slam import __version__
from icr_slam.errors import ConfigError, ConfigValidationError
from icr_slam.harness.aggregate import aggregate
from icr_slam.harness.environment import generate_environment
from icr_slam.harness.policies import LqrWeights
from icr_slam.harness.seeding import trial_seed
from icr_slam.harness.trial import TrialConfig, TrialResult, run_trial
from icr_slam.schemas.config import ExperimentConfig, RunManifest
from icr_slam.schemas.errors import items_from_pydantic

logger = logging.getLogger(__name__)

OUT_DIR_ENV = "ICR_SLAM_OUT_DIR"
DEFAULT_OUT_DIR = "results"
CSV_FLOAT_FORMAT = "%.10g"
TRIALS_DIR = "trials"
TRAJECTORIES_DIR = "trajectories"
LANDMARKS_DIR = "landmarks"


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Load and validate a JSON configuration or run manifest.

    An empty file yields the default configuration. A manifest written by
    ``run_experiment`` is accepted and its embedded config returned.

    Args:
        path: Path to the JSON file

    Returns:
        The validated ExperimentConfig

    Raises:
        OSError: If the file cannot be read
        ConfigError: If the file is not valid JSON
        ConfigValidationError: If a field fails validation
    """
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        logger.info(f"Empty configuration {path}; using defaults")
        return ExperimentConfig()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Cannot parse {path}: {e.msg}", line=e.lineno, column=e.colno) from e
    if not isinstance(data, dict):
        raise ConfigError(f"Configuration root of {path} must be an object")

    try:
        if "package_version" in data and "config" in data:
            manifest = RunManifest.model_validate(data)
            logger.info(f"Loaded run manifest from {path} (version {manifest.package_version})")
            return manifest.config
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigValidationError(items_from_pydantic(e.errors())) from e


def dump_config(cfg: ExperimentConfig, path: Union[str, Path]) -> Path:
    """Write ``cfg`` as JSON that ``load_config`` reads back unchanged."""
    path = Path(path)
    path.write_text(cfg.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def resolve_output_dir(cfg: ExperimentConfig, override: Optional[str] = None) -> Path:
    """Output directory: explicit override, config value, environment, then default."""
    return Path(override or cfg.output_dir or os.environ.get(OUT_DIR_ENV, DEFAULT_OUT_DIR))


def build_trial_config(cfg: ExperimentConfig, policy: str, seed: int) -> TrialConfig:
    """Turn the validated schema into the domain objects of one trial."""
    bounds = cfg.motion.to_bounds()
    start_pose = cfg.harness.start_pose
    return TrialConfig(
        policy=policy,
        total_steps=cfg.harness.total_steps,
        model=cfg.motion.to_model(),
        sensor=cfg.sensor.to_sensor(),
        icr=cfg.icr.to_icr_config(bounds),
        lqr=LqrWeights(
            q1=np.asarray(cfg.lqr.q1, dtype=float),
            q2_pattern=np.asarray(cfg.lqr.q2_pattern, dtype=float),
            r=np.asarray(cfg.lqr.r, dtype=float),
        ),
        seed=seed,
        u_init=np.asarray(cfg.icr.u_init, dtype=float),
        init_variance=cfg.harness.init_variance,
        init_robot_variance=cfg.harness.init_robot_variance,
        init_heading_noise=cfg.harness.init_heading_noise,
        start_pose=None if start_pose is None else np.asarray(start_pose, dtype=float),
    )


def _run_job(job: Tuple[ExperimentConfig, str, int]) -> TrialResult:
    cfg, policy, seed = job
    env = generate_environment(cfg.harness.bounds, cfg.harness.n_landmarks, seed)
    return run_trial(env, build_trial_config(cfg, policy, seed))


@dataclass
class ExperimentOutcome:
    """Files written by a run and the in-memory results."""
    out_dir: Path
    trial_files: List[Path]
    trajectory_files: List[Path]
    landmark_files: List[Path]
    summary_file: Path
    manifest_file: Path
    results: List[TrialResult] = field(default_factory=list)


def trial_file_name(policy: str, seed: int) -> str:
    return f"{policy}_seed{seed}.csv"


def _write_csv(frame: pd.DataFrame, path: Path) -> None:
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")


def run_experiment(cfg: ExperimentConfig, out_dir: Optional[str] = None) -> ExperimentOutcome:
    """Run every policy on every trial environment and write the results.

    Args:
        cfg: Validated configuration
        out_dir: Output directory overriding the config and environment

    Returns:
        ExperimentOutcome describing the written files

    Raises:
        OSError: If the output cannot be written
        NumericalError: If a trial fails numerically
    """
    target = resolve_output_dir(cfg, out_dir)
    resolved = cfg.model_copy(update={"output_dir": str(target)})
    seeds = [trial_seed(cfg.master_seed, i) for i in range(cfg.trials)]
    jobs = [(resolved, policy, seed) for seed in seeds for policy in cfg.policies]
    logger.info(
        f"Running {cfg.trials} trials x {len(cfg.policies)} policies "
        f"({cfg.harness.total_steps} steps, {cfg.harness.workers} workers)"
    )

    if cfg.harness.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.harness.workers) as pool:
            results = list(pool.map(_run_job, jobs))
    else:
        results = [_run_job(job) for job in jobs]

    trial_files, trajectory_files, landmark_files = [], [], []
    for subdir in (TRIALS_DIR, TRAJECTORIES_DIR, LANDMARKS_DIR):
        (target / subdir).mkdir(parents=True, exist_ok=True)
    for result in results:
        name = trial_file_name(result.policy, result.seed)
        _write_csv(result.to_frame(), target / TRIALS_DIR / name)
        _write_csv(result.trajectory_frame(), target / TRAJECTORIES_DIR / name)
        _write_csv(result.landmark_frame(), target / LANDMARKS_DIR / name)
        trial_files.append(target / TRIALS_DIR / name)
        trajectory_files.append(target / TRAJECTORIES_DIR / name)
        landmark_files.append(target / LANDMARKS_DIR / name)

    summaries = []
    for policy in cfg.policies:
        summary = aggregate([r for r in results if r.policy == policy])
        summary.insert(1, "policy", policy)
        summaries.append(summary)
    summary_file = target / "summary.csv"
    _write_csv(pd.concat(summaries, ignore_index=True), summary_file)

    manifest = RunManifest(package_version=__version__, config=resolved, trial_seeds=seeds)
    manifest_file = target / "manifest.json"
    manifest_file.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")

    logger.info(f"Wrote {len(trial_files)} trials with trajectories and landmark tracks, summary and manifest to {target}")
    return ExperimentOutcome(
        out_dir=target,
        trial_files=trial_files,
        trajectory_files=trajectory_files,
        landmark_files=landmark_files,
        summary_file=summary_file,
        manifest_file=manifest_file,
        results=results,
    )
