"""
Benchmark-scale checks against dense references and storage targets
"""

import time

import numpy as np
import pytest

from slar.cli.models import preset
from slar.core_engine.bench.initial_conditions import domain_lengths, landau_initial_condition
from slar.core_engine.cross_approx.params import AcaParams
from slar.core_engine.field_solve.poisson import compute_density
from slar.core_engine.ht_core.dimension_tree import DimensionTree
from slar.core_engine.ht_core.ht_tensor import ht_from_dense, ht_full, ht_random
from slar.core_engine.ht_core.indexing import delinearize
from slar.core_engine.sl_advect.grid import PhaseSpaceGrid, VlasovLayout
from slar.core_engine.sl_advect.sl_accessor import SemiLagrangianAccessor
from slar.core_engine.sl_advect.tracing import ConstantField
from slar.core_engine.vp_driver.solver import VlasovPoissonSolver, advect


def dense_htaca(acc, tree, params, stream=(), stats=None):
    """Stand-in for HTACA that evaluates every entry"""
    indices = delinearize(acc.shape, np.arange(int(np.prod(acc.shape))))
    return ht_from_dense(acc.evaluate(indices).reshape(acc.shape, order="F"), tree)


def landau_solver(d_x, n, alpha, eps_base, cfl, ordering="paired", r_max=None):
    layout = VlasovLayout.build(d_x, [n], domain_lengths(d_x, 0.5), 2 * np.pi, ordering)
    f0 = landau_initial_condition(layout, DimensionTree.build(2 * d_x), alpha, 0.5)
    solver = VlasovPoissonSolver(layout, AcaParams(eps_base=eps_base, r_max=r_max, rng_seed=1), cfl=cfl, threads=1)
    return solver, f0


@pytest.mark.stress
@pytest.mark.slow
class TestDenseReferences:

    def test_weak_landau_matches_dense_solver(self, mocker):
        solver, f0 = landau_solver(1, 64, 0.01, 1e-8, 5.0)
        low_rank = solver.evolve(solver.initialize(f0), 10.0)
        step_sizes = [record.dt for record in low_rank.history[1:]]

        mocker.patch("slar.core_engine.vp_driver.solver.htaca", side_effect=dense_htaca)
        dense_solver, _ = landau_solver(1, 64, 0.01, 1e-6, 5.0)
        dense = dense_solver.initialize(f0)
        for dt in step_sizes:
            dense_solver.step(dense, dt)

        assert low_rank.latest.time == pytest.approx(10.0)
        assert len(dense.history) == len(low_rank.history)
        for ours, ref in zip(low_rank.history, dense.history):
            assert ours.time == ref.time
            assert abs(ours.electric_energy - ref.electric_energy) <= 0.01 * ref.electric_energy
        assert low_rank.latest.relative_deviation(low_rank.initial)['mass'] <= 1e-4

    def test_2d2v_step_matches_dense_accessor(self):
        solver, f0 = landau_solver(2, 8, 0.5, 1e-8, 2.0)
        state = solver.initialize(f0)
        field = solver.stage_field(1.0, [(1.0, state.fields.E)])
        f_next, _ = advect(f0, solver.grid, 0.0, 0.2, field, AcaParams(eps_base=1e-8, rng_seed=2), (0, 1, 0))

        reference = SemiLagrangianAccessor(f0, solver.grid, 0.0, 0.2, field, threads=1)
        dense = dense_htaca(reference, f0.tree, None)
        expected = ht_full(dense)
        assert np.linalg.norm(ht_full(f_next) - expected) <= 1e-6 * np.linalg.norm(expected)

    def test_equilibrium_stays_field_free(self):
        solver, f0 = landau_solver(1, 32, 0.0, 1e-6, 2.0)
        state = solver.evolve(solver.initialize(f0), 1.0)
        rho = compute_density(state.f, solver.layout)
        assert np.max(np.abs(ht_full(rho))) <= 1e-8


@pytest.mark.stress
@pytest.mark.slow
class TestRanksAndStorage:

    def test_paired_ordering_keeps_ranks_lower(self):
        paired_solver, f0 = landau_solver(2, 32, 0.5, 1e-5, 5.0, "paired")
        paired = paired_solver.evolve(paired_solver.initialize(f0), 5.0)

        grouped_solver, g0 = landau_solver(2, 32, 0.5, 1e-5, 5.0, "grouped")
        grouped = grouped_solver.initialize(g0)
        for record in paired.history[1:]:
            grouped_solver.step(grouped, record.dt)

        assert paired.latest.time == pytest.approx(5.0)
        assert len(grouped.history) == len(paired.history)
        for ours, other in zip(paired.history, grouped.history):
            assert ours.time == other.time
            assert ours.max_interior_rank <= other.max_interior_rank

    def test_evaluations_scale_with_mode_size(self, tree4, rng):
        counts = []
        for n in (16, 32):
            grid = PhaseSpaceGrid((0.0,) * 4, (1.0,) * 4, (n,) * 4, ("periodic",) * 4)
            f = ht_random(tree4, (n,) * 4, 2, rng)
            _, acc = advect(f, grid, 0.0, 0.5, ConstantField([0.3, 0.1, -0.2, 0.05]),
                            AcaParams(eps_base=1e-6, r_max=4, rng_seed=0), (0, 1, 0))
            counts.append(acc.evaluation_count)
        # far below the 16x growth of the full grid
        assert counts[1] < 4 * counts[0]

    def test_step_time_grows_linearly_in_mode_size(self, tree4):
        sizes = (32, 64, 128)
        seconds = {}
        for n in sizes:
            grid = PhaseSpaceGrid((0.0,) * 4, (1.0,) * 4, (n,) * 4, ("periodic",) * 4)
            f = ht_random(tree4, (n,) * 4, 2, np.random.default_rng(n))
            field = ConstantField([0.3, 0.1, -0.2, 0.05])
            params = AcaParams(eps_base=1e-6, r_max=2, rng_seed=0)
            advect(f, grid, 0.0, 0.5, field, params, (0, 1, 0), threads=1)
            timings = []
            for repeat in range(3):
                started = time.perf_counter()
                advect(f, grid, 0.0, 0.5, field, params, (repeat, 1, 0), threads=1)
                timings.append(time.perf_counter() - started)
            seconds[n] = min(timings)
        for n in sizes[1:]:
            assert seconds[n] / seconds[sizes[0]] <= 1.3 * n / sizes[0]

    def test_two_stream_3d3v_smoke(self):
        config = preset("two-stream-3d3v", t_final=1.0, threads=1)
        layout = config.build_layout()
        solver = VlasovPoissonSolver(layout, config.aca_params(), cfl=config.cfl, threads=1)
        state = solver.initialize(config.initial_condition(layout, config.build_tree()))
        for _ in range(5):
            solver.step(state)
        record = state.latest
        assert record.step == 5
        assert record.max_rank <= 8
        assert record.compression_ratio < 0.05
        assert np.isfinite(record.electric_energy)
        for row in state.history:
            assert np.isfinite(row.electric_energy)
            assert row.electric_energy > 0
        assert record.relative_deviation(state.initial)['mass'] < 1e-2
