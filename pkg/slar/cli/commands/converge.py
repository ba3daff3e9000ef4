"""converge - spatial, temporal and rotation convergence studies"""

import argparse
import logging
from pathlib import Path

from ...config.settings import settings
from ...core_engine.bench.convergence import LandauCase, rotation_study, spatial_study, temporal_study
from ...core_engine.bench.initial_conditions import PlasmaProblem
from ...core_engine.errors import ConfigurationError
from ...core_engine.export.diagnostics_exporter import DiagnosticsExporter
from ..models import RunConfig

logger = logging.getLogger(__name__)

STUDIES = ("spatial", "temporal", "rotation")


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("converge", help="Estimate convergence orders")
    parser.add_argument("--config", help="Run configuration JSON (Landau); not needed for rotation")
    parser.add_argument("--levels", type=int, default=3, help="Number of refinement levels (>= 3)")
    parser.add_argument("--kind", choices=STUDIES, default="spatial")
    parser.add_argument("--output", help="Output directory")
    parser.set_defaults(handler=handle)
    return parser


def landau_case(config: RunConfig) -> LandauCase:
    if config.problem != PlasmaProblem.landau:
        raise ConfigurationError("Reversibility studies use the Landau problem")
    return LandauCase(d_x=config.d_x, alpha=config.alpha, k=config.k, v_max=config.v_max,
                      ordering=config.mode_ordering.value, strategy=config.tree_strategy,
                      gamma=config.gamma, r_max=config.r_max)


def convergence_study(kind: str, config: RunConfig, levels: int):
    """Refinement schedule derived from the configuration's mesh, tolerance and CFL"""
    if levels < 3:
        raise ConfigurationError("Convergence studies need at least 3 levels")
    if kind == "rotation":
        return rotation_study([32 * 2 ** i for i in range(levels)])

    case = landau_case(config)
    n0 = config.n_cells[0]
    if kind == "spatial":
        return spatial_study(case, [n0 * 2 ** i for i in range(levels)],
                             [config.eps_base * 10.0 ** (-i) for i in range(levels)],
                             cfl=config.cfl, t_final=config.t_final)
    return temporal_study(case, n0, [config.cfl * 2.0 ** (-i) for i in range(levels)],
                          eps_base=config.eps_base, t_final=config.t_final)


def handle(args: argparse.Namespace) -> int:
    try:
        if args.kind == "rotation" and not args.config:
            config = RunConfig(name="rotation")
        elif not args.config:
            raise ConfigurationError(f"--config is required for the {args.kind} study")
        else:
            config = RunConfig.from_json(args.config)
        table = convergence_study(args.kind, config, args.levels)
    except (ConfigurationError, ValueError) as e:
        logger.error(f"Convergence study failed: {e}")
        return 2
    except Exception as e:
        logger.error(f"Convergence study aborted: {e}")
        return 1

    output = Path(args.output) if args.output else settings.output_dir() / f"{config.name}_convergence"
    exporter = DiagnosticsExporter(str(output), config.d_v)
    result = exporter.export_convergence(table, f"convergence_{args.kind}",
                                         metadata=config.model_dump(mode='json'))
    if not result['success']:
        logger.error(f"Could not write convergence table: {result['error']}")
        return 1
    logger.info(f"{args.kind} convergence: fitted order {result['fitted_order']:.2f} ({result['output_path']})")
    return 0
