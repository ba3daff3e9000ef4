"""Cross approximation parameters"""

import math
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ...config.settings import settings
from ..ht_core.dimension_tree import DimensionTree


def _setting(key: str):
    return lambda: settings.get_cross_approx_config()[key]


class AcaParams(BaseModel):
    """Tolerances, rank bounds and sampling seed for HTACA"""
    model_config = ConfigDict(frozen=True)

    eps_base: float = Field(1e-3, gt=0, description="Relative tolerance at the root")
    gamma: float = Field(default_factory=_setting("gamma"), gt=0, le=1,
                         description="Tolerance decay per tree level")
    r_min: int = Field(default_factory=_setting("r_min"), ge=1, description="Per-node rank floor")
    r_max: Optional[int] = Field(None, ge=1, description="Per-node rank cap (None: unbounded)")
    leaf_r_min: int = Field(1, ge=1, description="Rank floor applied to leaf nodes only")
    r_hash_min: int = Field(default_factory=_setting("r_hash_min"), ge=1,
                            description="Minimum number of rank-one corrections per subtree")
    r_hash_max: Optional[int] = Field(None, ge=1,
                                      description="Maximum number of corrections (default 2 r_max)")
    rng_seed: int = Field(default_factory=_setting("rng_seed"), ge=0)
    pivot_safeguard: float = Field(default_factory=_setting("pivot_safeguard"), gt=0)
    local_truncation_factor: float = Field(default_factory=_setting("local_truncation_factor"), gt=0)

    @model_validator(mode="after")
    def check_bounds(self) -> "AcaParams":
        if self.r_max is not None and self.r_min > self.r_max:
            raise ValueError(f"r_min ({self.r_min}) exceeds r_max ({self.r_max})")
        if self.r_hash_max is not None and self.r_hash_min > self.r_hash_max:
            raise ValueError(f"r_hash_min ({self.r_hash_min}) exceeds r_hash_max ({self.r_hash_max})")
        return self

    def correction_cap(self, n_left: int, n_right: int) -> int:
        """Finite bound on corrections for a subtree with the given row/column counts"""
        if self.r_hash_max is not None:
            return self.r_hash_max
        if self.r_max is not None:
            return 2 * self.r_max
        return max(min(n_left, n_right), self.r_hash_min)

    def rank_floors(self, tree: DimensionTree) -> dict:
        floor = max(self.r_min, self.leaf_r_min)
        return {i: (floor if node.is_leaf else self.r_min) for i, node in enumerate(tree.nodes)}

    def with_tolerance(self, eps_base: float) -> "AcaParams":
        return self.model_copy(update={"eps_base": eps_base})


def sampling_params(order: int) -> Tuple[int, int]:
    """Sample count 3^order and refinement rounds order-1"""
    if order < 1:
        raise ValueError(f"Node order must be at least 1, got {order}")
    return 3 ** order, order - 1


def tolerance_at_depth(params: AcaParams, tree_depth: int, subtree_depth: int, estimate: float) -> float:
    return math.pow(params.gamma, tree_depth - subtree_depth) * params.eps_base * estimate
