"""Exact low-rank initial conditions for the Landau and two-stream benchmarks"""

import logging
from enum import Enum
from typing import Dict, List, Tuple, Union

import numpy as np

from ..errors import ConfigurationError
from ..ht_core.dimension_tree import DimensionTree
from ..ht_core.ht_tensor import DTYPE, HTTensor, from_node_arrays
from ..sl_advect.grid import VlasovLayout

logger = logging.getLogger(__name__)


class PlasmaProblem(str, Enum):
    landau = "landau"
    two_stream = "two-stream"


# A node carries one basis "key" per additive term it can represent: key 0 is the
# unperturbed product, key mu is the cos(k x_mu) perturbation. Each key maps to a
# coefficient vector over the node's columns.
KeyMap = Dict[int, np.ndarray]


def maxwellian(v: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * v ** 2) / np.sqrt(2.0 * np.pi)


def _velocity_leaf(problem: PlasmaProblem, v: np.ndarray, v0: float) -> Tuple[np.ndarray, KeyMap]:
    if problem == PlasmaProblem.landau:
        return maxwellian(v)[:, None], {0: np.ones(1)}
    beams = np.column_stack([maxwellian(v - v0), maxwellian(v + v0)])
    return beams, {0: np.full(2, 0.5)}


def _spatial_leaf(mode_index: int, x: np.ndarray, k: float, perturbed: bool) -> Tuple[np.ndarray, KeyMap]:
    if not perturbed:
        return np.ones((x.size, 1)), {0: np.ones(1)}
    frame = np.column_stack([np.ones(x.size), np.cos(k * x)])
    return frame, {0: np.array([1.0, 0.0]), mode_index: np.array([0.0, 1.0])}


def _assemble(layout: VlasovLayout, tree: DimensionTree, problem: PlasmaProblem,
              alpha: float, k: float, v0: float) -> HTTensor:
    grid = layout.grid
    if tree.d != grid.d:
        raise ConfigurationError(f"Tree has {tree.d} modes, grid has {grid.d}")
    perturbed = alpha != 0.0
    spatial_key = {mode: j + 1 for j, mode in enumerate(layout.spatial_modes)}

    arrays: Dict[int, np.ndarray] = {}
    keys: Dict[int, KeyMap] = {}
    for node_id in tree.postorder():
        node = tree.nodes[node_id]
        if node.is_leaf:
            mode = node.modes[0]
            centers = grid.centers(mode)
            if mode in spatial_key:
                frame, keymap = _spatial_leaf(spatial_key[mode], centers, k, perturbed)
            else:
                frame, keymap = _velocity_leaf(problem, centers, v0)
            arrays[node_id], keys[node_id] = frame, keymap
            continue

        left, right = keys.pop(node.left), keys.pop(node.right)
        out_keys = sorted(set(left) | set(right))
        r_l = next(iter(left.values())).size
        r_r = next(iter(right.values())).size
        b3 = np.zeros((r_l, r_r, len(out_keys)), dtype=DTYPE)
        for c, key in enumerate(out_keys):
            lvec = left[key] if key in left else left[0]
            rvec = right[key] if key in right else right[0]
            b3[:, :, c] = np.outer(lvec, rvec)

        if node_id == tree.root:
            mix = np.array([1.0 if key == 0 else alpha for key in out_keys])
            b3 = np.einsum("abc,c->ab", b3, mix)[:, :, None]
            keymap = {0: np.ones(1)}
        else:
            keymap = {key: np.eye(len(out_keys))[c] for c, key in enumerate(out_keys)}
        arrays[node_id] = b3.reshape(r_l * r_r, -1, order="F")
        keys[node_id] = keymap

    return from_node_arrays(tree, grid.counts, arrays)


def landau_initial_condition(layout: VlasovLayout, tree: DimensionTree, alpha: float, k: float) -> HTTensor:
    """(2 pi)^(-d/2) (1 + alpha sum cos(k x_mu)) exp(-|v|^2 / 2)"""
    return _assemble(layout, tree, PlasmaProblem.landau, alpha, k, 0.0)


def two_stream_initial_condition(layout: VlasovLayout, tree: DimensionTree, alpha: float, k: float,
                                 v0: float) -> HTTensor:
    """(1 + alpha sum cos(k x_mu)) prod_j (M(v_j - v0) + M(v_j + v0)) / 2"""
    return _assemble(layout, tree, PlasmaProblem.two_stream, alpha, k, v0)


def build_initial_condition(problem: Union[str, PlasmaProblem], layout: VlasovLayout, tree: DimensionTree,
                            alpha: float, k: float, v0: float = 0.0) -> HTTensor:
    try:
        problem = PlasmaProblem(problem)
    except ValueError:
        raise ConfigurationError(f"Unknown problem: {problem}")
    f0 = _assemble(layout, tree, problem, alpha, k, v0)
    logger.info(f"Initial condition {problem.value}: ranks {f0.ranks()}, storage {f0.storage_count()}")
    return f0


def initial_condition_values(problem: Union[str, PlasmaProblem], layout: VlasovLayout,
                             points: np.ndarray, alpha: float, k: float, v0: float = 0.0) -> np.ndarray:
    """Pointwise analytic values at phase-space points (M, d)"""
    problem = PlasmaProblem(problem)
    points = np.atleast_2d(points)
    x = points[:, list(layout.spatial_modes)]
    v = points[:, list(layout.velocity_modes)]
    spatial = 1.0 + alpha * np.sum(np.cos(k * x), axis=1)
    if problem == PlasmaProblem.landau:
        velocity = np.prod(maxwellian(v), axis=1)
    else:
        velocity = np.prod(0.5 * (maxwellian(v - v0) + maxwellian(v + v0)), axis=1)
    return spatial * velocity


def domain_lengths(d_x: int, k: float) -> List[float]:
    """Periodic box [0, 2 pi / k] in every spatial direction"""
    return [2.0 * np.pi / k] * d_x
