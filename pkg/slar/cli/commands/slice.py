"""slice - 2D phase-space slice of a checkpoint as tidy CSV"""

import argparse
import logging
from pathlib import Path
from typing import Dict, Tuple

from ...core_engine.bench.slicing import extract_slice
from ...core_engine.data_management.checkpoint_manager import CheckpointManager
from ...core_engine.errors import ConfigurationError
from ...core_engine.export.diagnostics_exporter import DiagnosticsExporter
from ..models import RunConfig

logger = logging.getLogger(__name__)


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("slice", help="Extract a 2D slice from a checkpoint")
    parser.add_argument("--checkpoint", required=True, help="Checkpoint file or directory")
    parser.add_argument("--modes", required=True, help="Free modes as 'mu,nu' (0-based)")
    parser.add_argument("--fixed", default="", help="Values of the other modes as 'mode=value,...'")
    parser.add_argument("--output", help="Output directory (default: next to the checkpoint)")
    parser.set_defaults(handler=handle)
    return parser


def parse_modes(text: str) -> Tuple[int, int]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if len(parts) != 2:
        raise ConfigurationError(f"--modes needs two comma-separated modes, got '{text}'")
    return int(parts[0]), int(parts[1])


def parse_fixed(text: str) -> Dict[int, float]:
    fixed = {}
    for item in filter(None, (p.strip() for p in text.split(","))):
        if "=" not in item:
            raise ConfigurationError(f"Fixed value '{item}' must look like mode=value")
        mode, value = item.split("=", 1)
        fixed[int(mode)] = float(value)
    return fixed


def handle(args: argparse.Namespace) -> int:
    checkpoint = Path(args.checkpoint)
    try:
        manager = CheckpointManager(checkpoint if checkpoint.is_dir() else checkpoint.parent)
        f, metadata = manager.load(checkpoint)
        if 'config' not in metadata:
            raise ConfigurationError("Checkpoint carries no run configuration")
        config = RunConfig.model_validate(metadata['config'])
        result = extract_slice(f, config.build_layout().grid, parse_modes(args.modes), parse_fixed(args.fixed))
    except (ConfigurationError, ValueError, OSError) as e:
        logger.error(f"Slice extraction failed: {e}")
        return 2

    output = Path(args.output) if args.output else manager.checkpoint_dir.parent
    exported = DiagnosticsExporter(str(output), config.d_v).export_slice(
        result, f"slice_step{metadata.get('step', 0)}_{result.names[0]}_{result.names[1]}.csv")
    if not exported['success']:
        logger.error(f"Could not write slice: {exported['error']}")
        return 1
    logger.info(f"Slice written to {exported['output_path']}")
    return 0
