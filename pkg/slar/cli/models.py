"""Pydantic models for benchmark run configuration"""

import json
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator

from ..config.settings import settings
from ..core_engine.bench.initial_conditions import PlasmaProblem, build_initial_condition, domain_lengths
from ..core_engine.cross_approx.params import AcaParams
from ..core_engine.errors import ConfigurationError
from ..core_engine.ht_core.dimension_tree import DimensionTree, TreeStrategy
from ..core_engine.ht_core.ht_tensor import HTTensor
from ..core_engine.sl_advect.grid import VlasovLayout


class ModeOrdering(str, Enum):
    paired = "paired"      # x1, v1, x2, v2, ...
    grouped = "grouped"    # x1, x2, ..., v1, v2, ...


PROBLEM_DEFAULTS: Dict[PlasmaProblem, Dict[str, Any]] = {
    PlasmaProblem.landau: {'k': 0.5, 'v_max': 2.0 * math.pi, 'v0': 0.0, 'leaf_r_min': 1},
    PlasmaProblem.two_stream: {'k': 0.2, 'v_max': 8.0, 'v0': 2.4, 'leaf_r_min': 3},
}


class RunConfig(BaseModel):
    """One benchmark run; every field defaults to the reference experiment settings"""
    name: str = Field("run", min_length=1)
    problem: PlasmaProblem = PlasmaProblem.landau
    d_x: int = Field(1, ge=1, le=3)
    d_v: Optional[int] = Field(None, ge=1, le=3)
    alpha: float = Field(0.01, ge=0, description="Perturbation amplitude")
    k: Optional[float] = Field(None, gt=0, description="Perturbation wavenumber")
    v0: Optional[float] = Field(None, ge=0, description="Beam drift (two-stream only)")
    v_max: Optional[float] = Field(None, gt=0, description="Velocity box half-width")
    n_cells: List[int] = Field(default_factory=lambda: [64], description="Cells per mode (one value or one per mode)")
    cfl: float = Field(default_factory=lambda: settings.get("time_integration.cfl", 5.0), gt=0)
    eps_base: float = Field(1e-4, gt=0, lt=1)
    gamma: float = Field(default_factory=lambda: settings.get("cross_approx.gamma", 0.1), gt=0, le=1)
    r_min: int = Field(1, ge=1)
    r_max: Optional[int] = Field(None, ge=1)
    leaf_r_min: Optional[int] = Field(None, ge=1)
    r_hash_min: int = Field(1, ge=1)
    r_hash_max: Optional[int] = Field(None, ge=1)
    tree_strategy: TreeStrategy = TreeStrategy.balanced
    mode_ordering: ModeOrdering = ModeOrdering.paired
    t_final: float = Field(10.0, ge=0)
    output_dir: Optional[str] = None
    rng_seed: int = Field(default_factory=lambda: settings.get("cross_approx.rng_seed", 0), ge=0)
    checkpoint_interval: int = Field(default_factory=lambda: settings.get("benchmark.checkpoint_interval", 10),
                                     ge=0, description="Steps between checkpoints (0 disables)")
    threads: Optional[int] = Field(None, ge=1)

    @model_validator(mode="before")
    @classmethod
    def fill_problem_defaults(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        problem = PlasmaProblem(data.get('problem', PlasmaProblem.landau))
        for key, value in PROBLEM_DEFAULTS[problem].items():
            if data.get(key) is None:
                data[key] = value
        if data.get('d_v') is None:
            data['d_v'] = data.get('d_x', 1)
        return data

    @field_validator('n_cells')
    @classmethod
    def check_cells(cls, v: List[int]) -> List[int]:
        if not v or any(n < 4 for n in v):
            raise ValueError("Every mode needs at least 4 cells")
        return v

    @model_validator(mode="after")
    def check_consistency(self) -> "RunConfig":
        if self.d_v != self.d_x:
            raise ValueError(f"d_v ({self.d_v}) must equal d_x ({self.d_x})")
        if len(self.n_cells) not in (1, 2 * self.d_x):
            raise ValueError(f"n_cells needs 1 or {2 * self.d_x} entries")
        if self.problem == PlasmaProblem.landau and self.d_x == 3 and self.alpha > 1.0 / 3.0:
            raise ValueError("3D3V Landau needs alpha <= 1/3 to keep the initial condition positive")
        if self.r_max is not None and self.r_min > self.r_max:
            raise ValueError("r_min exceeds r_max")
        return self

    # --- derived objects ------------------------------------------------------

    @property
    def d(self) -> int:
        return 2 * self.d_x

    def build_layout(self) -> VlasovLayout:
        return VlasovLayout.build(self.d_x, self.n_cells, domain_lengths(self.d_x, self.k), self.v_max,
                                  self.mode_ordering.value)

    def build_tree(self) -> DimensionTree:
        return DimensionTree.build(self.d, self.tree_strategy)

    def aca_params(self) -> AcaParams:
        return AcaParams(
            eps_base=self.eps_base, gamma=self.gamma, r_min=self.r_min, r_max=self.r_max,
            leaf_r_min=self.leaf_r_min, r_hash_min=self.r_hash_min, r_hash_max=self.r_hash_max,
            rng_seed=self.rng_seed,
        )

    def initial_condition(self, layout: Optional[VlasovLayout] = None,
                          tree: Optional[DimensionTree] = None) -> HTTensor:
        return build_initial_condition(self.problem, layout or self.build_layout(), tree or self.build_tree(),
                                       self.alpha, self.k, self.v0)

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "RunConfig":
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"Could not read run configuration {path}: {e}")
        return cls.model_validate(data)


# Presets from the benchmark suite, sized for a workstation
PRESETS: Dict[str, Dict[str, Any]] = {
    'landau-weak-1d1v': {'name': 'landau-weak-1d1v', 'problem': 'landau', 'd_x': 1, 'alpha': 0.01,
                         'n_cells': [64], 't_final': 10.0},
    'landau-strong-2d2v': {'name': 'landau-strong-2d2v', 'problem': 'landau', 'd_x': 2, 'alpha': 0.5,
                           'n_cells': [32], 't_final': 5.0},
    'landau-strong-3d3v': {'name': 'landau-strong-3d3v', 'problem': 'landau', 'd_x': 3, 'alpha': 1.0 / 3.0,
                           'n_cells': [16], 'r_max': 8, 't_final': 1.0},
    'two-stream-3d3v': {'name': 'two-stream-3d3v', 'problem': 'two-stream', 'd_x': 3, 'alpha': 0.001,
                        'n_cells': [16], 'r_max': 8, 't_final': 1.0},
}


def preset(name: str, **overrides) -> RunConfig:
    if name not in PRESETS:
        raise ConfigurationError(f"Unknown preset {name}; available: {sorted(PRESETS)}")
    return RunConfig.model_validate({**PRESETS[name], **overrides})
