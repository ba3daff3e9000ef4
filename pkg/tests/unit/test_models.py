"""
Unit tests for run configuration models and presets
"""

import json
import math
from pathlib import Path

import pytest

from slar.cli.models import PRESETS, ModeOrdering, RunConfig, preset
from slar.core_engine.bench.initial_conditions import PlasmaProblem
from slar.core_engine.errors import ConfigurationError

PRESET_DIR = Path(__file__).parent.parent.parent / "config" / "presets"


@pytest.mark.unit
class TestRunConfig:

    def test_landau_defaults(self):
        config = RunConfig()
        assert config.problem == PlasmaProblem.landau
        assert config.k == 0.5
        assert config.v_max == pytest.approx(2 * math.pi)
        assert config.d_v == 1
        assert config.d == 2

    def test_two_stream_defaults(self):
        config = RunConfig(problem="two-stream", d_x=3, n_cells=[8])
        assert (config.k, config.v_max, config.v0, config.leaf_r_min) == (0.2, 8.0, 2.4, 3)

    def test_explicit_values_win(self):
        config = RunConfig(problem="two-stream", k=0.4, v0=1.0)
        assert config.k == 0.4
        assert config.v0 == 1.0

    @pytest.mark.parametrize("overrides", [
        {'d_x': 2, 'd_v': 1},
        {'n_cells': [2]},
        {'n_cells': [8, 8, 8]},
        {'d_x': 3, 'alpha': 0.5},
        {'r_min': 4, 'r_max': 2},
        {'eps_base': 0.0},
        {'cfl': -1.0},
    ])
    def test_invalid_configurations(self, overrides):
        with pytest.raises(ValueError):
            RunConfig(**overrides)

    def test_layout_and_tree(self):
        config = RunConfig(d_x=2, n_cells=[8, 8, 4, 4], mode_ordering="grouped", tree_strategy="paired-unbalanced")
        layout = config.build_layout()
        assert config.mode_ordering == ModeOrdering.grouped
        assert layout.grid.counts == (8, 8, 4, 4)
        assert layout.spatial_modes == (0, 1)
        assert layout.grid.upper[0] == pytest.approx(4 * math.pi)
        assert config.build_tree().d == 4

    def test_aca_params(self):
        params = RunConfig(eps_base=1e-5, r_max=6, rng_seed=9, problem="two-stream").aca_params()
        assert params.eps_base == 1e-5
        assert params.r_max == 6
        assert params.rng_seed == 9
        assert params.leaf_r_min == 3

    def test_initial_condition_shape(self):
        config = RunConfig(d_x=1, n_cells=[8])
        assert config.initial_condition().shape == (8, 8)

    def test_from_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({'name': 'file-run', 'n_cells': [16], 't_final': 1.0}))
        config = RunConfig.from_json(path)
        assert config.name == "file-run"
        assert config.n_cells == [16]

    def test_from_json_errors(self, tmp_path):
        with pytest.raises(ConfigurationError):
            RunConfig.from_json(tmp_path / "missing.json")
        broken = tmp_path / "broken.json"
        broken.write_text("{not json")
        with pytest.raises(ConfigurationError):
            RunConfig.from_json(broken)


@pytest.mark.unit
class TestPresets:

    def test_all_presets_validate(self):
        for name in PRESETS:
            config = preset(name)
            assert config.name == name

    def test_overrides(self):
        config = preset("landau-weak-1d1v", n_cells=[16], t_final=0.5)
        assert config.n_cells == [16]
        assert config.t_final == 0.5

    def test_unknown_preset(self):
        with pytest.raises(ConfigurationError):
            preset("landau-9d9v")

    def test_preset_files_match(self):
        for path in sorted(PRESET_DIR.glob("*.json")):
            config = RunConfig.from_json(path)
            assert config.name in PRESETS
            expected = preset(config.name)
            assert (config.problem, config.d_x, config.n_cells) == (expected.problem, expected.d_x, expected.n_cells)
