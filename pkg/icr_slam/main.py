"""
Command-line entry point (``icr-slam``).

Exit statuses: 0 success, 1 Jacobian check failures, 2 configuration
errors, 3 I/O errors, 4 numerical failures.
"""

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from icr_slam.errors import ConfigError, ConfigValidationError, NumericalError
from icr_slam.experiment import OUT_DIR_ENV, load_config, run_experiment
from icr_slam.schemas.config import POLICY_KINDS, ExperimentConfig
from icr_slam.schemas.errors import items_from_pydantic

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="icr-slam",
        description="Run active SLAM experiments with iCR planning and LQR regulation",
    )
    parser.add_argument("--config", help="JSON configuration or run manifest (defaults if omitted)")
    parser.add_argument("--seed", type=int, help="Override the master seed")
    parser.add_argument("--policy", action="append", choices=POLICY_KINDS,
                        help="Policy to run; repeat for several (default: all)")
    parser.add_argument("--trials", type=int, help="Override the number of trials")
    parser.add_argument("--out-dir",
                        help=f"Output directory (default: config value, then ${OUT_DIR_ENV}, then ./results)")
    parser.add_argument("--workers", type=int, help="Parallel trial processes")
    parser.add_argument("--jacobian-check", action="store_true",
                        help="Run the finite-difference Jacobian suite and exit")
    parser.add_argument("--log-level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Logging level")
    return parser


def apply_overrides(cfg: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    """Apply command-line overrides and re-validate the result."""
    data = cfg.model_dump()
    if args.seed is not None:
        data["master_seed"] = args.seed
    if args.policy:
        data["policies"] = list(dict.fromkeys(args.policy))
    if args.trials is not None:
        data["trials"] = args.trials
    if args.workers is not None:
        data["harness"]["workers"] = args.workers
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigValidationError(items_from_pydantic(e.errors())) from e


def run_jacobian_check() -> int:
    from icr_slam.diagnostics.jacobian_check import run_checks

    results = run_checks()
    failed = [r.name for r in results if not r.passed]
    for r in results:
        print(f"{r.name:<22} {'PASS' if r.passed else 'FAIL'}  max_error={r.max_error:.2e}  tol={r.tolerance:.0e}")
    if failed:
        logger.error(f"Jacobian checks failed: {', '.join(failed)}")
        return EXIT_CHECK_FAILED
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run the requested action and return the exit status."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT)

    if args.jacobian_check:
        return run_jacobian_check()

    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        cfg = apply_overrides(cfg, args)
    except ConfigValidationError as e:
        logger.error(e.to_response().model_dump_json())
        return EXIT_CONFIG
    except ConfigError as e:
        logger.error(str(e))
        return EXIT_CONFIG
    except OSError as e:
        logger.error(f"Cannot read configuration: {e}")
        return EXIT_IO

    try:
        outcome = run_experiment(cfg, out_dir=args.out_dir)
    except NumericalError as e:
        logger.error(f"Numerical failure: {e}")
        return EXIT_NUMERICAL
    except OSError as e:
        logger.error(f"Cannot write results: {e}")
        return EXIT_IO

    print(f"Results written to {outcome.out_dir}")
    return EXIT_OK


def run_cli():
    """Entry point for the console script installed as ``icr-slam``."""
    sys.exit(main())


if __name__ == "__main__":
    run_cli()
