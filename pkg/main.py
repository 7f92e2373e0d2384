"""
main.py

Entry point for the nematic droplet hedgehog laboratory.

Subcommands (one experiment each, see experiments/):

    profile   solve the radial hedgehog profile      -> profile.csv, bounds_report.json
    verify    run the identity battery                -> verify.json
    energy    1-D and lattice energies, E(r)/r scan   -> energy.json, monotonicity.csv
    relax     gradient-flow relaxation on the lattice -> relax.json, history.csv, field.csv, checkpoints/
    compare   hedgehog vs biaxial perturbation        -> compare.json

Every subcommand also writes run_config.json. Configuration comes from a
plain `key = value` file (--config) and repeated --set key=value overrides.

Exit codes: 0 success, 1 usage/configuration, 2 solver failure,
3 relaxation instability.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from loguru import logger

from config import EXIT_USAGE, LOG_FILE, LOG_LEVEL
from experiments.compare_experiment import CompareExperiment
from experiments.energy_experiment import EnergyExperiment
from experiments.profile_experiment import ProfileExperiment
from experiments.relax_experiment import RelaxExperiment
from experiments.verify_experiment import VerifyExperiment
from tools.errors import LabError, UsageError
from tools.run_config import load_run_config

EXPERIMENTS = {
    "profile": ProfileExperiment,
    "verify": VerifyExperiment,
    "energy": EnergyExperiment,
    "relax": RelaxExperiment,
    "compare": CompareExperiment,
}


class _ArgumentParser(argparse.ArgumentParser):
    """argparse that raises UsageError instead of exiting with status 2."""

    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="hedgehog-lab", description=__doc__.split("\n\n")[1])
    sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(EXPERIMENTS) + "}")
    for name, experiment in EXPERIMENTS.items():
        cmd = sub.add_parser(name, help=(experiment.__doc__ or "").strip().splitlines()[0])
        cmd.add_argument("--config", type=Path, default=None, help="key = value run file")
        cmd.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a configuration key (repeatable, applied after --config)",
        )
        cmd.add_argument("--out-dir", type=Path, default=None, help="output directory (overrides out_dir)")
        cmd.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    return parser


# ----------------------------------------------------------------------
# Logging
# ----------------------------------------------------------------------
def setup_logging(out_dir: Path, verbose: bool = False):
    level = "DEBUG" if verbose else LOG_LEVEL
    logger.remove()  # remove default handler
    out_dir.mkdir(parents=True, exist_ok=True)
    logger.add(
        out_dir / LOG_FILE,
        level=level,
        rotation="5 MB",
        retention="10 days",
        backtrace=True,
        diagnose=True,
    )
    logger.add(
        lambda msg: print(msg, end="", file=sys.stderr),  # mirror to stderr
        level=level,
    )


# ----------------------------------------------------------------------
# Main entry point
# ----------------------------------------------------------------------
def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run one experiment and return its exit code.

    LabError subclasses map to their exit_code; anything else exits 1.
    """
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError(f"a subcommand is required: {', '.join(EXPERIMENTS)}")
        overrides = list(args.overrides)
        if args.out_dir is not None:
            overrides.append(f"out_dir={args.out_dir}")
        config = load_run_config(args.config, overrides)
    except LabError as exc:
        logger.error(f"[main] {exc}")
        return exc.exit_code

    out_dir = Path(config.out_dir)
    setup_logging(out_dir, args.verbose)
    logger.info(f"[main] Running '{args.command}' into {out_dir}")

    experiment = EXPERIMENTS[args.command](config=config, out_dir=out_dir, logger=logger)
    try:
        code = experiment.execute()
    except LabError as exc:
        logger.error(f"[main] {type(exc).__name__}: {exc}")
        return exc.exit_code
    except Exception as exc:
        logger.exception(f"[main] Unhandled exception in '{args.command}': {exc}")
        return EXIT_USAGE
    logger.info(f"[main] '{args.command}' finished with exit code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
