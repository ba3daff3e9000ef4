"""
Unit tests for phase-space grids, layouts and backward characteristic tracing
"""

import numpy as np
import pytest

from slar.core_engine.errors import ConfigurationError, NonFiniteValueError
from slar.core_engine.sl_advect.grid import BoundaryKind, PhaseSpaceGrid, VlasovLayout, locate_cell
from slar.core_engine.sl_advect.tracing import ConstantField, RotationField, ZeroField, trace_rk3


def unit_grid(n=4, boundary=BoundaryKind.periodic):
    return PhaseSpaceGrid((0.0,), (1.0,), (n,), (boundary,))


@pytest.mark.unit
class TestPhaseSpaceGrid:

    def test_spacing_and_centers(self):
        grid = unit_grid(4)
        np.testing.assert_allclose(grid.spacing, [0.25])
        np.testing.assert_allclose(grid.centers(0), [0.125, 0.375, 0.625, 0.875])
        assert grid.cell_volume == pytest.approx(0.25)
        assert grid.names == ("x1",)

    def test_locate_cell_faces_go_low(self):
        grid = unit_grid(4)
        cells = locate_cell(np.array([[0.3], [0.25], [0.0], [1.0]]), grid)
        np.testing.assert_array_equal(cells[:, 0], [1, 0, 0, 3])

    def test_confine_wraps_periodic_and_clamps_truncated(self):
        grid = PhaseSpaceGrid((0.0, -1.0), (1.0, 1.0), (4, 4), (BoundaryKind.periodic, BoundaryKind.truncated))
        points, clamped = grid.confine(np.array([[1.25, 0.5], [-0.25, 1.5], [0.5, -0.5]]))
        np.testing.assert_allclose(points, [[0.25, 0.5], [0.75, 1.0], [0.5, -0.5]])
        assert clamped == 1

    def test_invalid_grids(self):
        with pytest.raises(ConfigurationError):
            PhaseSpaceGrid((0.0,), (0.0,), (4,), (BoundaryKind.periodic,))
        with pytest.raises(ConfigurationError):
            PhaseSpaceGrid((0.0,), (1.0,), (0,), (BoundaryKind.periodic,))

    def test_sub_grid(self):
        grid = PhaseSpaceGrid((0.0, -1.0, 2.0), (1.0, 1.0, 3.0), (4, 5, 6), ("periodic", "truncated", "periodic"),
                              ("a", "b", "c"))
        sub = grid.sub_grid([0, 2])
        assert sub.counts == (4, 6)
        assert sub.names == ("a", "c")
        assert bool(np.all(sub.periodic))


@pytest.mark.unit
class TestVlasovLayout:

    def test_paired_ordering(self):
        layout = VlasovLayout.build(2, [8], [4.0, 4.0], 3.0)
        assert layout.spatial_modes == (0, 2)
        assert layout.velocity_modes == (1, 3)
        assert layout.grid.names == ("x1", "v1", "x2", "v2")
        np.testing.assert_allclose(layout.v_max, [3.0, 3.0])

    def test_grouped_ordering(self):
        layout = VlasovLayout.build(2, [8, 8, 4, 4], [4.0, 4.0], 3.0, "grouped")
        assert layout.spatial_modes == (0, 1)
        assert layout.velocity_modes == (2, 3)
        np.testing.assert_allclose(layout.velocity_spacing, [1.5, 1.5])
        assert layout.spatial_grid.counts == (8, 8)

    def test_unknown_ordering(self):
        with pytest.raises(ConfigurationError):
            VlasovLayout.build(1, [8], [4.0], 3.0, "diagonal")

    def test_spatial_modes_must_be_periodic(self):
        grid = PhaseSpaceGrid((0.0, -1.0), (1.0, 1.0), (4, 4), ("truncated", "truncated"))
        with pytest.raises(ConfigurationError):
            VlasovLayout(grid, (0,), (1,))

    def test_every_mode_assigned_once(self):
        grid = PhaseSpaceGrid((0.0, -1.0), (1.0, 1.0), (4, 4), ("periodic", "truncated"))
        with pytest.raises(ConfigurationError):
            VlasovLayout(grid, (0,), (0,))


@pytest.mark.unit
class TestTraceRK3:

    def test_constant_field_is_exact(self):
        points = np.array([[0.1, 0.2], [0.5, -0.3]])
        feet, clamped = trace_rk3(points, 1.0, 0.5, ConstantField([2.0, -1.0]))
        np.testing.assert_allclose(feet, points - 0.5 * np.array([2.0, -1.0]))
        assert clamped == 0

    def test_zero_field_keeps_points(self):
        points = np.array([[0.25, 0.75]])
        feet, _ = trace_rk3(points, 2.0, 0.0, ZeroField())
        np.testing.assert_array_equal(feet, points)

    def test_rotation_is_third_order(self):
        field = RotationField(omega=1.0)
        points = np.array([[1.0, 0.0], [0.3, -0.7]])
        errors = []
        for dt in (0.1, 0.05):
            feet, _ = trace_rk3(points, dt, 0.0, field)
            errors.append(np.max(np.abs(feet - field.exact_foot(points, dt))))
        # local error of a third-order scheme scales like dt^4
        assert 14.0 < errors[0] / errors[1] < 18.0
        assert errors[0] < 1e-5

    def test_feet_confined_with_grid(self):
        grid = unit_grid(4)
        feet, clamped = trace_rk3(np.array([[0.125]]), 1.0, 0.0, ConstantField([0.25]), grid)
        np.testing.assert_allclose(feet, [[0.875]])
        assert clamped == 0

    def test_clamped_feet_counted(self):
        grid = unit_grid(4, BoundaryKind.truncated)
        feet, clamped = trace_rk3(np.array([[0.125], [0.875]]), 1.0, 0.0, ConstantField([5.0]), grid)
        np.testing.assert_allclose(feet, [[0.0], [0.0]])
        assert clamped == 2

    def test_forward_interval_rejected(self):
        with pytest.raises(ValueError):
            trace_rk3(np.zeros((1, 1)), 0.0, 1.0, ZeroField())

    def test_non_finite_field(self):
        def broken(points, t):
            return np.full_like(points, np.nan)

        with pytest.raises(NonFiniteValueError):
            trace_rk3(np.zeros((2, 1)), 1.0, 0.0, broken)
