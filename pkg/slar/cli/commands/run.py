"""run - execute a configured benchmark"""

import argparse
import logging

from ...core_engine.errors import ConfigurationError
from ..models import RunConfig, preset
from ..runner import BenchmarkRunner

logger = logging.getLogger(__name__)


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("run", help="Run a Landau or two-stream benchmark")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", help="Run configuration JSON")
    source.add_argument("--preset", help="Built-in preset name")
    parser.add_argument("--output", help="Output directory (overrides the configuration)")
    parser.add_argument("--resume", help="Checkpoint file or checkpoint directory to resume from")
    parser.set_defaults(handler=handle)
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    if getattr(args, "preset", None):
        return preset(args.preset)
    return RunConfig.from_json(args.config)


def handle(args: argparse.Namespace) -> int:
    try:
        config = load_config(args)
    except (ConfigurationError, ValueError) as e:
        logger.error(f"Invalid run configuration: {e}")
        return 2

    result = BenchmarkRunner(config, args.output).run(resume=args.resume)
    if result['success']:
        logger.info(f"Diagnostics written to {result['diagnostics_path']}")
    else:
        logger.error(f"Run failed: {result.get('error')}")
    return int(result['exit_code'])
