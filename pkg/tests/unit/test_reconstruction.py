"""
Unit tests for the P2 stencil reconstruction
"""

import numpy as np
import pytest

from slar.core_engine.errors import ShapeMismatchError
from slar.core_engine.ht_core.dimension_tree import DimensionTree
from slar.core_engine.ht_core.ht_tensor import ht_from_dense, ht_rank_one
from slar.core_engine.sl_advect.grid import BoundaryKind, PhaseSpaceGrid
from slar.core_engine.sl_advect.reconstruction import (coefficient_count, eval_field_offgrid, gather_stencil,
                                                       p2_coefficients, p2_evaluate, reconstruct_at,
                                                       stencil_offsets, stencil_size)


def quadratic(xi):
    """A full quadratic in three variables"""
    return (1.0 + 2.0 * xi[:, 0] - xi[:, 1] + 0.5 * xi[:, 2]
            + 3.0 * xi[:, 0] ** 2 - xi[:, 1] ** 2 + 0.75 * xi[:, 2] ** 2
            + 0.25 * xi[:, 0] * xi[:, 1] - 2.0 * xi[:, 1] * xi[:, 2] + xi[:, 0] * xi[:, 2])


@pytest.mark.unit
class TestStencil:

    def test_sizes(self):
        assert [stencil_size(d) for d in (1, 2, 3, 6)] == [3, 9, 19, 73]
        assert coefficient_count(6) == 28

    def test_offset_order(self):
        offsets = stencil_offsets(2)
        expected = [[0, 0], [1, 0], [0, 1], [-1, 0], [0, -1], [1, 1], [-1, -1], [1, -1], [-1, 1]]
        np.testing.assert_array_equal(offsets, expected)

    def test_offsets_read_only(self):
        with pytest.raises(ValueError):
            stencil_offsets(3)[0, 0] = 5

    def test_wrong_stencil_size(self):
        with pytest.raises(ShapeMismatchError):
            p2_coefficients(np.zeros((2, 5)), 2)


@pytest.mark.unit
class TestP2Reconstruction:

    def test_quadratics_reproduced(self, rng):
        offsets = stencil_offsets(3).astype(float)
        values = quadratic(offsets)[None, :]
        xi = rng.uniform(-0.5, 0.5, size=(50, 3))
        coeffs = p2_coefficients(np.repeat(values, 50, axis=0), 3)
        assert coeffs.count == coefficient_count(3)
        np.testing.assert_allclose(p2_evaluate(coeffs, xi), quadratic(xi), atol=1e-12)

    def test_reconstruct_gridded_quadratic(self, rng):
        grid = PhaseSpaceGrid((0.0, -1.0), (1.0, 1.0), (8, 8), (BoundaryKind.truncated, BoundaryKind.truncated))
        x, y = np.meshgrid(grid.centers(0), grid.centers(1), indexing="ij")
        dense = 1.0 + x - 2.0 * y + x ** 2 + 0.5 * x * y - y ** 2
        t = ht_from_dense(dense, DimensionTree.build(2))
        points = np.column_stack([rng.uniform(0.25, 0.75, 40), rng.uniform(-0.5, 0.5, 40)])
        px, py = points[:, 0], points[:, 1]
        exact = 1.0 + px - 2.0 * py + px ** 2 + 0.5 * px * py - py ** 2
        np.testing.assert_allclose(reconstruct_at(t, grid, points).real, exact, atol=1e-12)

    def test_gather_wraps_or_zero_fills(self):
        tree = DimensionTree.build(1)
        t = ht_from_dense(np.array([1.0, 2.0, 3.0, 4.0]), tree)
        cells = np.array([[0]])
        periodic = gather_stencil(t, PhaseSpaceGrid((0.0,), (1.0,), (4,), ("periodic",)), cells)
        truncated = gather_stencil(t, PhaseSpaceGrid((0.0,), (1.0,), (4,), ("truncated",)), cells)
        np.testing.assert_array_equal(periodic.real, [[1.0, 2.0, 4.0]])
        np.testing.assert_array_equal(truncated.real, [[1.0, 2.0, 0.0]])

    def test_eval_field_offgrid(self):
        grid = PhaseSpaceGrid((0.0, 0.0), (2 * np.pi, 2 * np.pi), (16, 16), ("periodic", "periodic"))
        tree = DimensionTree.build(2)
        ones = np.ones(16)
        e1 = ht_rank_one(tree, [np.sin(grid.centers(0)), ones])
        e2 = ht_rank_one(tree, [ones, 1j * np.ones(16)])
        x = np.array([[0.3, 1.0], [2.0, 5.0], [6.0, 0.1]])
        values = eval_field_offgrid([e1, e2], x, grid)
        assert values.shape == (3, 2)
        np.testing.assert_allclose(values[:, 0], np.sin(x[:, 0]), atol=1e-2)
        np.testing.assert_allclose(values[:, 1], 0.0, atol=1e-14)
