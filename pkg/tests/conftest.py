"""
Pytest configuration and shared fixtures for the slar test-suite
"""

import sys
from pathlib import Path

import numpy as np
import pytest

project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from slar.cli.models import RunConfig
from slar.core_engine.bench.initial_conditions import domain_lengths, landau_initial_condition
from slar.core_engine.cross_approx.params import AcaParams
from slar.core_engine.ht_core.dimension_tree import DimensionTree
from slar.core_engine.ht_core.ht_tensor import ht_random
from slar.core_engine.sl_advect.grid import VlasovLayout


@pytest.fixture
def rng():
    """Seeded generator so every test draws the same data"""
    return np.random.default_rng(1234)


@pytest.fixture
def tree4():
    return DimensionTree.build(4)


@pytest.fixture
def random_ht4(tree4, rng):
    """Random 4-mode HTD, shape 5^4, all ranks 3"""
    return ht_random(tree4, (5, 5, 5, 5), 3, rng)


@pytest.fixture
def layout_1d1v():
    """Weak Landau box [0, 4 pi] x [-2 pi, 2 pi] with 16 cells per mode"""
    return VlasovLayout.build(1, [16], domain_lengths(1, 0.5), 2.0 * np.pi)


@pytest.fixture
def landau_1d1v(layout_1d1v):
    tree = DimensionTree.build(2)
    return landau_initial_condition(layout_1d1v, tree, 0.01, 0.5)


@pytest.fixture
def layout_2d2v():
    return VlasovLayout.build(2, [8], domain_lengths(2, 0.5), 2.0 * np.pi)


@pytest.fixture
def aca_params():
    return AcaParams(eps_base=1e-6, gamma=0.1, rng_seed=11)


@pytest.fixture
def small_run_config(tmp_path):
    """1D1V weak Landau run small enough for integration tests"""
    return RunConfig(
        name="test-run",
        problem="landau",
        d_x=1,
        alpha=0.01,
        n_cells=[16],
        cfl=2.0,
        eps_base=1e-6,
        t_final=0.0,
        output_dir=str(tmp_path / "run"),
        checkpoint_interval=1,
        threads=1,
    )
