"""P2 polynomial reconstruction on the compact (1 + 2d + 4 C(d,2))-point stencil"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Sequence, Tuple

import numpy as np

from ..errors import ShapeMismatchError
from ..ht_core.ht_tensor import HTTensor, ht_entries
from .grid import PhaseSpaceGrid, locate_cell

logger = logging.getLogger(__name__)


def stencil_size(d: int) -> int:
    return 1 + 2 * d + 4 * comb(d, 2)


def coefficient_count(d: int) -> int:
    return 1 + 2 * d + comb(d, 2)


@lru_cache(maxsize=16)
def mode_pairs(d: int) -> Tuple[Tuple[int, int], ...]:
    return tuple(combinations(range(d), 2))


@lru_cache(maxsize=16)
def stencil_offsets(d: int) -> np.ndarray:
    """Offsets in the order: center, +e_mu, -e_mu, then per pair (++, --, +-, -+)"""
    offsets = [np.zeros(d, dtype=np.int64)]
    eye = np.eye(d, dtype=np.int64)
    offsets.extend(eye)
    offsets.extend(-eye)
    for mu, nu in mode_pairs(d):
        for s_mu, s_nu in ((1, 1), (-1, -1), (1, -1), (-1, 1)):
            offset = np.zeros(d, dtype=np.int64)
            offset[mu], offset[nu] = s_mu, s_nu
            offsets.append(offset)
    result = np.asarray(offsets)
    result.setflags(write=False)
    return result


@dataclass
class P2Coefficients:
    """Coefficients of p(xi) = a0 + sum a_mu xi_mu + sum a_mumu xi_mu^2 + sum a_munu xi_mu xi_nu"""
    constant: np.ndarray   # (M,)
    linear: np.ndarray     # (M, d)
    quadratic: np.ndarray  # (M, d)
    mixed: np.ndarray      # (M, C(d,2)) in mode_pairs order

    @property
    def d(self) -> int:
        return self.linear.shape[1]

    @property
    def count(self) -> int:
        return 1 + self.linear.shape[1] + self.quadratic.shape[1] + self.mixed.shape[1]


def p2_coefficients(values: np.ndarray, d: int) -> P2Coefficients:
    """Closed-form coefficients from stencil values laid out as stencil_offsets(d)"""
    values = np.atleast_2d(values)
    if values.shape[1] != stencil_size(d):
        raise ShapeMismatchError(f"Stencil for d={d} needs {stencil_size(d)} values, got {values.shape[1]}")
    center = values[:, 0]
    plus = values[:, 1:1 + d]
    minus = values[:, 1 + d:1 + 2 * d]
    corners = values[:, 1 + 2 * d:].reshape(values.shape[0], -1, 4)
    return P2Coefficients(
        constant=center,
        linear=0.5 * (plus - minus),
        quadratic=0.5 * (plus + minus) - center[:, None],
        mixed=0.25 * (corners[:, :, 0] + corners[:, :, 1] - corners[:, :, 2] - corners[:, :, 3]),
    )


def p2_evaluate(coeffs: P2Coefficients, xi: np.ndarray) -> np.ndarray:
    """Evaluate at normalized local coordinates xi = (x - x_cell) / dx, shape (M, d)"""
    xi = np.atleast_2d(xi)
    result = coeffs.constant + np.sum(coeffs.linear * xi, axis=1) + np.sum(coeffs.quadratic * xi * xi, axis=1)
    pairs = mode_pairs(coeffs.d)
    if pairs:
        first = [p[0] for p in pairs]
        second = [p[1] for p in pairs]
        result = result + np.sum(coeffs.mixed * xi[:, first] * xi[:, second], axis=1)
    return result


def gather_stencil(t: HTTensor, grid: PhaseSpaceGrid, cells: np.ndarray) -> np.ndarray:
    """Stencil values around each cell; periodic modes wrap, truncated modes read 0 outside"""
    offsets = stencil_offsets(grid.d)
    points = cells[:, None, :] + offsets[None, :, :]
    counts = np.asarray(grid.counts)
    periodic = grid.periodic
    points = np.where(periodic, np.mod(points, counts), points)
    inside = np.all((points >= 0) & (points < counts), axis=2)

    values = np.zeros(points.shape[:2], dtype=np.complex128)
    if np.any(inside):
        values[inside] = ht_entries(t, points[inside])
    return values


def reconstruct_at(t: HTTensor, grid: PhaseSpaceGrid, points: np.ndarray) -> np.ndarray:
    """P2 reconstruction of the gridded tensor t at arbitrary points (M, d)"""
    points, _ = grid.confine(np.atleast_2d(points))
    cells = locate_cell(points, grid)
    xi = (points - grid.center_points(cells)) / grid.spacing
    coeffs = p2_coefficients(gather_stencil(t, grid, cells), grid.d)
    return p2_evaluate(coeffs, xi)


def eval_field_offgrid(components: Sequence[HTTensor], x: np.ndarray, grid: PhaseSpaceGrid) -> np.ndarray:
    """Real parts of each field component reconstructed at spatial points x (M, d_x)"""
    x = np.atleast_2d(x)
    out = np.empty((x.shape[0], len(components)))
    for j, component in enumerate(components):
        out[:, j] = reconstruct_at(component, grid, x).real
    return out
