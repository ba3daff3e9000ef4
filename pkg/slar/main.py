"""Command-line entry point for SLAR benchmarks"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .config.settings import settings
from .cli.commands import converge, run, slice as slice_command

logger = logging.getLogger(__name__)


def configure_logging(output_dir: Optional[Path] = None):
    handlers: List[logging.Handler] = [logging.StreamHandler()]
    if settings.get("logging.to_file", True):
        log_dir = settings.ensure_directories(output_dir)["logs"]
        handlers.append(logging.FileHandler(log_dir / settings.get("logging.log_file", "slar.log")))
    logging.basicConfig(
        level=logging.DEBUG if settings.is_development() else getattr(logging, settings.get("logging.level", "INFO")),
        format=settings.get("logging.log_format", "%(asctime)s - %(name)s - %(levelname)s - %(message)s"),
        handlers=handlers,
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slar", description="Low-rank semi-Lagrangian Vlasov-Poisson benchmarks")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Override log level")
    subparsers = parser.add_subparsers(dest="command", required=True)
    run.register(subparsers)
    converge.register(subparsers)
    slice_command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.log_level:
        settings.set("logging.level", args.log_level)
    output = getattr(args, "output", None)
    configure_logging(Path(output) if output else None)
    logger.info(f"slar {args.command} (threads={settings.get('runtime.threads')})")
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
