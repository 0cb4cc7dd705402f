"""
Command-line front end for the sparse random graph spectral tools.

Usage:
    python scripts/spectral_cli.py moments --max-k 8 --intensity 1/2
    python scripts/spectral_cli.py oracle-check --max-k 6 --jobs 4
    python scripts/spectral_cli.py simulate --n 2000 --samples 100 --max-k 3 --out artifacts/sim.csv
    python scripts/spectral_cli.py bounds --max-k 24 --format json
    python scripts/spectral_cli.py degrees --n 2000 --samples 20
    python scripts/spectral_cli.py replay artifacts/sim.csv

Exit codes: 0 success, 1 validation failure, 2 oracle mismatch,
3 tolerance breach, 4 eigensolver failure.
"""

import sys
import argparse
import logging
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

# Add parent to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from pipelines.executor import EXIT_VALIDATION, run
from pipelines.run_config import RunConfig, Subcommand, load_config_header

logger = logging.getLogger(__name__)

# CLI flag -> RunConfig field
FLAG_FIELDS = {
    'max_k': 'max_k',
    'intensity': 'intensity',
    'n': 'n',
    'samples': 'sample_count',
    'seed': 'base_seed',
    'bins': 'bin_count',
    'out': 'output_path',
    'format': 'output_format',
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--max-k', type=int, help='Largest moment order k')
    common.add_argument('--intensity', type=str, help='Edge intensity p, e.g. 1, 0.5 or 1/2')
    common.add_argument('--n', type=int, help='Vertex count for sampled graphs')
    common.add_argument('--samples', type=int, help='Number of sampled graphs')
    common.add_argument('--seed', type=int, help='Seed of the first sample')
    common.add_argument('--bins', type=int, help='Histogram bin count')
    common.add_argument('--out', type=str, help='Artifact path (default artifacts/<subcommand>.<format>)')
    common.add_argument('--format', choices=['csv', 'json'], help='Artifact format')

    logging_flags = argparse.ArgumentParser(add_help=False)
    logging_flags.add_argument('--jobs', type=int, default=1, help='Parallel workers (joblib n_jobs)')
    logging_flags.add_argument('--verbose', action='store_true', help='Debug logging')
    logging_flags.add_argument('--quiet', action='store_true', help='Warnings and errors only')

    parser = argparse.ArgumentParser(description='Exact and simulated spectral moments of sparse random graphs')
    subparsers = parser.add_subparsers(dest='subcommand', required=True)
    for subcommand in Subcommand:
        subparsers.add_parser(subcommand.value, parents=[common, logging_flags])
    replay = subparsers.add_parser('replay', parents=[logging_flags], help='Rerun the config embedded in an artifact')
    replay.add_argument('artifact', type=str)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = {
        field: getattr(args, flag)
        for flag, field in FLAG_FIELDS.items()
        if getattr(args, flag) is not None
    }
    if 'output_path' not in values:
        values['output_path'] = f"artifacts/{args.subcommand}.{values.get('output_format', 'csv')}"
    return RunConfig(subcommand=args.subcommand, **values)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(level=level, format='%(asctime)s - %(levelname)s - %(message)s')

    try:
        if args.subcommand == 'replay':
            config = load_config_header(args.artifact)
        else:
            config = config_from_args(args)
    except (ValidationError, ValueError, OSError) as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_VALIDATION

    logger.info("=" * 50)
    logger.info(f"Running {config.subcommand.value}")
    logger.info("=" * 50)

    code = run(config, n_jobs=args.jobs)
    logger.info(f"Finished with exit code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
