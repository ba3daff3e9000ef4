#!/usr/bin/env python3
"""
Scaling Benchmark - wall time of one SLAR advection against mesh size and HT rank
"""

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from slar.core_engine.cross_approx.params import AcaParams
from slar.core_engine.ht_core.dimension_tree import DimensionTree
from slar.core_engine.ht_core.ht_tensor import ht_random
from slar.core_engine.sl_advect.grid import BoundaryKind, PhaseSpaceGrid
from slar.core_engine.sl_advect.tracing import ConstantField
from slar.core_engine.vp_driver.solver import advect

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


def periodic_grid(d: int, n: int) -> PhaseSpaceGrid:
    return PhaseSpaceGrid([0.0] * d, [2.0 * np.pi] * d, [n] * d, [BoundaryKind.periodic] * d)


def time_advection(d: int, n: int, rank: int, eps_base: float = 1e-6, seed: int = 0) -> dict:
    """One constant-velocity SLAR step of a random rank-r tensor"""
    tree = DimensionTree.build(d)
    grid = periodic_grid(d, n)
    f = ht_random(tree, grid.counts, rank, np.random.default_rng(seed))
    field = ConstantField(np.linspace(0.5, 1.5, d))
    params = AcaParams(eps_base=eps_base, r_max=2 * rank)

    start = time.perf_counter()
    f_next, acc = advect(f, grid, 0.0, 0.1, field, params)
    seconds = time.perf_counter() - start
    return {
        'd': d,
        'n': n,
        'rank': rank,
        'seconds': seconds,
        'evaluations': acc.evaluation_count,
        'max_rank': f_next.max_rank(),
    }


def run_scaling(d: int, sizes, ranks, output: str = None):
    results = {'mesh': [], 'rank': []}

    logger.info(f"Mesh scaling at rank {ranks[0]} in {d} dimensions")
    for n in sizes:
        entry = time_advection(d, n, ranks[0])
        logger.info(f"  N={n:4d}: {entry['seconds']:.3f} s, {entry['evaluations']} evaluations")
        results['mesh'].append(entry)

    logger.info(f"Rank scaling at N={sizes[0]}")
    for rank in ranks:
        entry = time_advection(d, sizes[0], rank)
        logger.info(f"  r={rank:3d}: {entry['seconds']:.3f} s, {entry['evaluations']} evaluations")
        results['rank'].append(entry)

    for key, variable in (('mesh', 'n'), ('rank', 'rank')):
        entries = results[key]
        if len(entries) > 1:
            slope = np.polyfit(np.log([e[variable] for e in entries]), np.log([e['seconds'] for e in entries]), 1)[0]
            logger.info(f"Empirical exponent in {variable}: {slope:.2f}")

    if output:
        with open(output, 'w', encoding='utf-8') as f:
            json.dump(results, f, indent=2)
        logger.info(f"Results written to {output}")
    return results


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dims", type=int, default=4)
    parser.add_argument("--sizes", type=int, nargs="+", default=[16, 32, 64, 128])
    parser.add_argument("--ranks", type=int, nargs="+", default=[2, 4, 8])
    parser.add_argument("--output", help="Write timings as JSON")
    args = parser.parse_args()

    run_scaling(args.dims, args.sizes, args.ranks, args.output)
