"""
Command-Line Entry Point for the Overlap Laboratory

This script provides three subcommands:
- sample: eigenvalue point clouds of CGE, spherical or truncated-unitary draws
- overlap-hist: scaled diagonal overlaps inside a bulk window
- verify: one verification experiment with a JSON (and optional CSV) report

Exit codes: 0 pass, 1 statistical failure, 2 usage error, 3 numerical error.
"""

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

from .errors import EXIT_PASS, EXIT_USAGE_ERROR, OverlapLabError, exit_code_for
from .logger import log_error, setup_exception_hook, setup_logging
from .experiments.commands import cmd_overlap_hist, cmd_sample, cmd_verify
from .experiments.experiment_config import DEFAULT_ENSEMBLE, ExperimentConfig, load_config
from .experiments.experiment_types import Command, Experiment

logger = logging.getLogger(__name__)

# argparse dest -> config key
OVERRIDE_KEYS = ('experiment', 'ensemble', 'n', 'm', 'replicas', 'seed', 'alpha', 'threads',
                 'out', 'format', 'sphere', 'window', 'max_n', 'block_size')


def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser with one subparser per command."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, default=None,
                        help='YAML configuration file (flags override its values)')
    common.add_argument('--ensemble', type=str, default=None, choices=['cge', 'sph', 'tue'],
                        help='Matrix ensemble (default: sph; schur and identities run all three)')
    common.add_argument('--n', type=int, default=None,
                        help='Matrix size N (default: per command or suite)')
    common.add_argument('--m', type=int, default=None,
                        help='TUE embedding size M >= N (default: 2N; M = N for limit-law)')
    common.add_argument('--replicas', type=int, default=None,
                        help='Number of replicas (default: per command or suite)')
    common.add_argument('--seed', type=int, default=None,
                        help='Master seed (default: $OVERLAP_LAB_SEED, then 0)')
    common.add_argument('--alpha', type=float, default=None,
                        help='KS significance level (default: 0.001)')
    common.add_argument('--threads', type=int, default=None,
                        help='Worker threads (default: 1; results do not depend on it)')
    common.add_argument('--block-size', dest='block_size', type=int, default=None,
                        help='Replicas per random stream block (default: 1000)')
    common.add_argument('--out', type=str, default=None,
                        help='Output directory (default: results)')
    common.add_argument('--format', type=str, default=None, choices=['csv', 'json'],
                        help='Report format for verify (default: json)')
    common.add_argument('--verbose', action='store_true',
                        help='Enable debug logging')
    common.add_argument('--log-file', dest='log_file', type=str, default=None,
                        help='Append log output to this file')

    parser = argparse.ArgumentParser(
        prog='overlap_lab',
        description='Eigenvector overlaps of non-Hermitian random matrices'
    )
    subparsers = parser.add_subparsers(dest='command', required=True)

    sample = subparsers.add_parser(Command.SAMPLE.value, parents=[common],
                                   help='Write eigenvalue samples to samples.csv')
    sample.add_argument('--sphere', action='store_true', default=None,
                        help='Add stereographic sphere coordinates sx, sy, sz')

    hist = subparsers.add_parser(Command.OVERLAP_HIST.value, parents=[common],
                                 help='Write scaled diagonal overlaps to overlaps.csv')
    hist.add_argument('--window', type=float, default=None,
                      help='Keep eigenvalues with |z| < window (default: 0.8)')
    hist.add_argument('--max-n', dest='max_n', type=int, default=None,
                      help='Largest N accepted (default: 256)')

    verify = subparsers.add_parser(Command.VERIFY.value, parents=[common],
                                   help='Run one verification experiment')
    verify.add_argument('--experiment', type=str, default=None,
                        choices=[e.value for e in Experiment],
                        help='Experiment to run')
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    """Layer defaults, the --config file and explicit flags."""
    file_values: Dict[str, Any] = load_config(args.config) if args.config else {}
    overrides = {key: getattr(args, key, None) for key in OVERRIDE_KEYS}
    overrides['command'] = args.command
    return ExperimentConfig.from_sources(file_values, overrides)


def print_banner(config: ExperimentConfig):
    print("\n" + "=" * 80)
    print(f"Overlap Laboratory - {config.command.value}")
    print("=" * 80)
    print("Configuration:")
    if config.command == Command.VERIFY:
        print(f"  Experiment: {config.experiment}")
        print(f"  Ensemble: {config.get('ensemble', 'suite default')}")
    else:
        print(f"  Ensemble: {config.get('ensemble', DEFAULT_ENSEMBLE)}")
    print(f"  N: {config.get('n', 'suite default')}")
    if config.ensemble == 'tue':
        print(f"  M: {config.get('m', 'default')}")
    print(f"  Replicas: {config.get('replicas', 'default')}")
    print(f"  Seed: {config.seed}")
    print(f"  Threads: {config.threads}")
    print(f"  Output: {config.out}")
    print("=" * 80 + "\n")


def run(config: ExperimentConfig) -> int:
    """Execute the configured command and return its exit code."""
    command = config.command
    if command == Command.SAMPLE:
        paths = cmd_sample(config)
        print(f"  [OK] Wrote {paths[0]}")
        return EXIT_PASS

    if command == Command.OVERLAP_HIST:
        paths, summary = cmd_overlap_hist(config)
        print(f"  Eigenvalues in window: {summary['count']} (skipped {summary['skipped']})")
        print(f"  Median O/N: {summary['median']:.4f} (inverse-gamma_2 median {summary['limit_median']:.4f})")
        if summary['ks'] is not None:
            verdict = "PASS" if summary['ks']['passed'] else "FAIL"
            print(f"  KS against inverse-gamma_2: D = {summary['ks']['statistic']:.4f} [{verdict}]")
        for path in paths:
            print(f"  [OK] Wrote {path}")
        return EXIT_PASS

    if config.experiment_type is None:
        print("  [ERROR] verify needs --experiment")
        return EXIT_USAGE_ERROR
    report, paths = cmd_verify(config)
    for record in report.tests:
        if record.kind == 'discrepancy':
            status = "FLAGGED" if record.flagged else "info"
        else:
            status = "PASS" if record.passed else "FAIL"
        print(f"  [{status}] {record.name}")
    print(f"\nResult: {'PASS' if report.passed else 'FAIL'}")
    for path in paths:
        print(f"  [OK] Wrote {path}")
    return report.exit_code()


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run the command and map the outcome to an exit code.

    Args:
        argv: Argument list (defaults to sys.argv[1:])

    Returns:
        Process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE_ERROR if e.code not in (0, None) else EXIT_PASS

    setup_logging(logging.DEBUG if args.verbose else logging.WARNING, args.log_file)
    setup_exception_hook()

    try:
        config = config_from_args(args)
    except OSError as e:
        log_error(f"Cannot read configuration: {e}", context=args.command)
        print(f"  [ERROR] Cannot read configuration: {e}")
        return EXIT_USAGE_ERROR
    except OverlapLabError as e:
        print(f"  [ERROR] {e}")
        return exit_code_for(e)

    print_banner(config)
    try:
        return run(config)
    except OverlapLabError as e:
        log_error(str(e), exc_info=e, context=config.command.value)
        print(f"  [ERROR] {type(e).__name__}: {e}")
        return exit_code_for(e)


if __name__ == '__main__':
    sys.exit(main())
