"""
Unit tests for the spectral Poisson solver
"""

import numpy as np
import pytest
import scipy.fft

from slar.core_engine.bench.initial_conditions import landau_initial_condition, maxwellian
from slar.core_engine.cross_approx.params import AcaParams
from slar.core_engine.errors import NonFiniteValueError
from slar.core_engine.field_solve.poisson import (FieldSet, PoissonSolver, compute_density, gauss_residual,
                                                  solve_poisson, velocity_integral)
from slar.core_engine.field_solve.spectral import SpectralGrid, dft_leaves
from slar.core_engine.ht_core.dimension_tree import DimensionTree
from slar.core_engine.ht_core.ht_tensor import ht_from_dense, ht_full, ht_random, ht_rank_one
from slar.core_engine.ht_core.operations import ht_add


def velocity_mass(layout):
    """Midpoint integral of the Maxwellian over one velocity mode"""
    mode = layout.velocity_modes[0]
    return float(np.sum(maxwellian(layout.grid.centers(mode))) * layout.grid.spacing[mode])


@pytest.mark.unit
class TestSpectralGrid:

    def test_wavenumbers_in_fft_order(self):
        grid = SpectralGrid((2 * np.pi,), (4,))
        np.testing.assert_allclose(grid.wavenumbers(0), [0.0, 1.0, -2.0, -1.0])

    def test_k_squared(self):
        grid = SpectralGrid((2 * np.pi, np.pi), (4, 4))
        np.testing.assert_allclose(grid.k_squared(np.array([[1, 1], [3, 2]])), [1.0 + 4.0, 1.0 + 16.0])

    def test_low_frequency_indices(self):
        grid = SpectralGrid((1.0, 1.0), (8, 8))
        indices = grid.low_frequency_indices(1)
        assert indices.shape == (8, 2)
        assert not np.any(np.all(indices == 0, axis=1))
        assert set(np.unique(indices)) == {0, 1, 7}

    def test_leaf_dft_matches_fftn(self, random_ht4):
        spectrum = dft_leaves(random_ht4, "forward", workers=1)
        np.testing.assert_allclose(ht_full(spectrum), scipy.fft.fftn(ht_full(random_ht4)), atol=1e-10)

    def test_leaf_dft_round_trip(self, random_ht4):
        restored = dft_leaves(dft_leaves(random_ht4, "forward"), "inverse")
        assert np.max(np.abs(ht_full(restored) - ht_full(random_ht4))) <= 1e-12

    def test_unknown_direction(self, random_ht4):
        with pytest.raises(ValueError):
            dft_leaves(random_ht4, "sideways")


@pytest.mark.unit
class TestPoisson:

    def test_one_dimensional_cosine(self):
        n, length, alpha, k = 64, 4 * np.pi, 0.5, 0.5
        x = (np.arange(n) + 0.5) * length / n
        rho = ht_from_dense(alpha * np.cos(k * x), DimensionTree.build(1))
        fields = solve_poisson(rho, SpectralGrid((length,), (n,)), 1e-12, AcaParams())
        assert fields.d_x == 1
        assert np.max(np.abs(ht_full(fields.E[0]) - alpha / k * np.sin(k * x))) <= 1e-10

    def test_two_dimensional_htaca(self):
        n, length = 16, 2 * np.pi
        x = (np.arange(n) + 0.5) * length / n
        tree = DimensionTree.build(2)
        ones = np.ones(n)
        rho = ht_add(ht_rank_one(tree, [np.cos(x), ones]), ht_rank_one(tree, [ones, np.cos(x)]))
        spectral = SpectralGrid((length, length), (n, n))
        fields = solve_poisson(rho, spectral, 1e-12, AcaParams(rng_seed=5))
        e1 = np.sin(x)[:, None] * np.ones(n)[None, :]
        e2 = np.ones(n)[:, None] * np.sin(x)[None, :]
        assert np.max(np.abs(ht_full(fields.E[0]) - e1)) <= 1e-10
        assert np.max(np.abs(ht_full(fields.E[1]) - e2)) <= 1e-10
        assert gauss_residual(fields, spectral) <= 1e-10
        assert abs(ht_full(fields.phi_hat)[0, 0]) <= 1e-14

    def test_htaca_stats_collected(self):
        n = 8
        tree = DimensionTree.build(2)
        x = (np.arange(n) + 0.5) * 2 * np.pi / n
        rho = ht_rank_one(tree, [np.cos(x), np.cos(x)])
        solver = PoissonSolver(SpectralGrid((2 * np.pi, 2 * np.pi), (n, n)), AcaParams(eps_base=1e-8))
        solver.solve(rho, stream=(0, 0, 1))
        assert solver.stats.calls == 1
        assert solver.tolerance == pytest.approx(1e-9)

    def test_non_finite_density(self):
        rho = ht_from_dense(np.array([0.0, np.nan, 1.0, 2.0]), DimensionTree.build(1))
        with pytest.raises(NonFiniteValueError):
            solve_poisson(rho, SpectralGrid((1.0,), (4,)), 1e-8, AcaParams())

    def test_imaginary_residue_one_dimensional(self):
        n, length, tol = 64, 4 * np.pi, 1e-12
        x = (np.arange(n) + 0.5) * length / n
        rho = ht_from_dense(0.5 * np.cos(0.5 * x) + 0.2 * np.sin(1.5 * x), DimensionTree.build(1))
        fields = solve_poisson(rho, SpectralGrid((length,), (n,)), tol, AcaParams())
        assert np.max(np.abs(ht_full(fields.E[0]).imag)) <= 10 * tol

    def test_imaginary_residue_two_dimensional(self):
        n, length, tol = 16, 2 * np.pi, 1e-8
        x = (np.arange(n) + 0.5) * length / n
        tree = DimensionTree.build(2)
        rho = ht_add(ht_rank_one(tree, [np.cos(x), np.sin(2 * x)]),
                     ht_rank_one(tree, [np.sin(x), 0.5 * np.cos(3 * x)]))
        fields = solve_poisson(rho, SpectralGrid((length, length), (n, n)), tol, AcaParams(rng_seed=8))
        for component in fields.E:
            assert np.max(np.abs(ht_full(component).imag)) <= 10 * tol


@pytest.mark.unit
class TestDensity:

    def test_landau_density_1d1v(self, layout_1d1v, landau_1d1v):
        x = layout_1d1v.grid.centers(0)
        rho = compute_density(landau_1d1v, layout_1d1v)
        expected = -0.01 * np.cos(0.5 * x) * velocity_mass(layout_1d1v)
        np.testing.assert_allclose(ht_full(rho).real, expected, atol=1e-12)

    def test_landau_density_2d2v(self, layout_2d2v):
        f = landau_initial_condition(layout_2d2v, DimensionTree.build(4), 0.01, 0.5)
        x1 = layout_2d2v.grid.centers(0)
        x2 = layout_2d2v.grid.centers(2)
        mv = velocity_mass(layout_2d2v)
        expected = -0.01 * (np.cos(0.5 * x1)[:, None] + np.cos(0.5 * x2)[None, :]) * mv ** 2
        rho = compute_density(f, layout_2d2v)
        assert rho.shape == (8, 8)
        np.testing.assert_allclose(ht_full(rho).real, expected, atol=1e-12)

    def test_unperturbed_density_vanishes(self, layout_1d1v):
        f = landau_initial_condition(layout_1d1v, DimensionTree.build(2), 0.0, 0.5)
        assert np.max(np.abs(ht_full(compute_density(f, layout_1d1v)))) <= 1e-8

    def test_velocity_integral_shape(self, layout_2d2v, rng):
        f = ht_random(DimensionTree.build(4), layout_2d2v.grid.counts, 2, rng)
        g = velocity_integral(f, layout_2d2v)
        dv = layout_2d2v.velocity_spacing
        expected = ht_full(f).sum(axis=(1, 3)) * dv[0] * dv[1]
        np.testing.assert_allclose(ht_full(g), expected, atol=1e-10)

    def test_landau_field(self, layout_1d1v, landau_1d1v, aca_params):
        solver = PoissonSolver(SpectralGrid.from_grid(layout_1d1v.spatial_grid), aca_params)
        fields = solver.solve_for(landau_1d1v, layout_1d1v)
        assert isinstance(fields, FieldSet)
        x = layout_1d1v.grid.centers(0)
        expected = -0.01 * velocity_mass(layout_1d1v) * np.sin(0.5 * x) / 0.5
        np.testing.assert_allclose(ht_full(fields.E[0]).real, expected, atol=1e-12)
        assert complex(fields.rho0).real == pytest.approx(velocity_mass(layout_1d1v))
