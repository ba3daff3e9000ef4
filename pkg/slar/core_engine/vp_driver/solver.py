"""Nonlinear Vlasov-Poisson time integration with SLAR stages"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from ..cross_approx.htaca import HTACAStats, htaca
from ..cross_approx.params import AcaParams
from ..field_solve.poisson import FieldSet, PoissonSolver
from ..field_solve.spectral import SpectralGrid
from ..ht_core.ht_tensor import HTTensor
from ..ht_core.operations import ht_sub, map_leaf
from ..ht_core.truncation import ht_norm
from ..sl_advect.grid import PhaseSpaceGrid, VlasovLayout
from ..sl_advect.sl_accessor import SemiLagrangianAccessor
from ..sl_advect.tracing import VelocityField
from ..sl_advect.velocity_fields import FieldTerm, VlasovStageField
from .diagnostics import compute_diagnostics, compute_dt
from .state import SimState

logger = logging.getLogger(__name__)

ADVECTION, FIELD = 0, 1


def advect(f: HTTensor, grid: PhaseSpaceGrid, t_n: float, t_next: float, field: VelocityField,
           params: AcaParams, stream: Sequence[int] = (), stats: Optional[HTACAStats] = None,
           threads: Optional[int] = None) -> Tuple[HTTensor, SemiLagrangianAccessor]:
    """HTACA applied to the local SL solver; also returns the accessor for its counters"""
    acc = SemiLagrangianAccessor(f, grid, t_n, t_next, field, threads=threads)
    f_next = htaca(acc, f.tree, params, stream, stats)
    if acc.clamped_feet:
        logger.warning(f"{acc.clamped_feet} characteristic foot coordinates clamped to the velocity box")
    return f_next, acc


def slar_step(f: HTTensor, grid: PhaseSpaceGrid, t_n: float, t_next: float, field: VelocityField,
              params: AcaParams, stream: Sequence[int] = (), stats: Optional[HTACAStats] = None) -> HTTensor:
    """F^{n+1} = SLAR(F^n, t_n, t_{n+1}, a, eps_base)"""
    return advect(f, grid, t_n, t_next, field, params, stream, stats)[0]


def reverse_velocity(f: HTTensor, layout: VlasovLayout) -> HTTensor:
    """f(x, v) -> f(x, -v) by reversing the rows of every velocity leaf frame"""
    for mode in layout.velocity_modes:
        f = map_leaf(f, mode, lambda frame: frame[::-1])
    return f


class VlasovPoissonSolver:
    """Third-order exponential integrator (CF3) built from three SLAR advections.

    Stage fields are frozen over [t_n, t_n + dt]:
      F1 = SLAR(f_n; v/3, E_n/3)
      F2 = SLAR(f_n; 2v/3, 2 E1/3)
      f_{n+1} = SLAR(F1; 2v/3, -E_n/12 + 3 E2/4)
    """

    def __init__(self, layout: VlasovLayout, params: AcaParams, cfl: Optional[float] = None,
                 dt_floor: Optional[float] = None, threads: Optional[int] = None,
                 poisson: Optional[PoissonSolver] = None):
        self.layout = layout
        self.params = params
        self.cfl = cfl
        self.dt_floor = dt_floor
        self.threads = threads
        self.spectral = SpectralGrid.from_grid(layout.spatial_grid)
        self.poisson = poisson if poisson is not None else PoissonSolver(self.spectral, params, workers=threads)
        self.stats = HTACAStats()
        self.clamped_feet = 0
        self.evaluation_offset = 0

    @property
    def grid(self) -> PhaseSpaceGrid:
        return self.layout.grid

    @property
    def accessor_evaluations(self) -> int:
        return self.evaluation_offset + self.stats.evaluations + self.poisson.stats.evaluations

    def solve_fields(self, f: HTTensor, stream: Sequence[int] = ()) -> FieldSet:
        return self.poisson.solve_for(f, self.layout, stream)

    def stage_field(self, v_coef: float, terms: Sequence[FieldTerm]) -> VlasovStageField:
        return VlasovStageField(self.layout, v_coef, terms)

    def slar(self, f: HTTensor, t_n: float, t_next: float, field: VelocityField,
             stream: Sequence[int] = ()) -> HTTensor:
        f_next, acc = advect(f, self.grid, t_n, t_next, field, self.params, stream, self.stats, self.threads)
        self.clamped_feet += acc.clamped_feet
        return f_next

    def rkei_cf3_step(self, f_n: HTTensor, t_n: float, dt: float, fields_n: Optional[FieldSet] = None,
                      step_index: int = 0) -> HTTensor:
        if dt <= 0:
            raise ValueError(f"Time step must be positive, got {dt}")
        t_next = t_n + dt
        if fields_n is None:
            fields_n = self.solve_fields(f_n, (step_index, 0, FIELD))
        e_n = fields_n.E

        f1 = self.slar(f_n, t_n, t_next, self.stage_field(1.0 / 3.0, [(1.0 / 3.0, e_n)]),
                       (step_index, 1, ADVECTION))
        e_1 = self.solve_fields(f1, (step_index, 1, FIELD)).E

        f2 = self.slar(f_n, t_n, t_next, self.stage_field(2.0 / 3.0, [(2.0 / 3.0, e_1)]),
                       (step_index, 2, ADVECTION))
        e_2 = self.solve_fields(f2, (step_index, 2, FIELD)).E

        field_3 = self.stage_field(2.0 / 3.0, [(-1.0 / 12.0, e_n), (3.0 / 4.0, e_2)])
        return self.slar(f1, t_n, t_next, field_3, (step_index, 3, ADVECTION))

    def initialize(self, f0: HTTensor, t0: float = 0.0, step_index: int = 0) -> SimState:
        """State with fields and the diagnostics record of f0"""
        if tuple(f0.shape) != tuple(self.grid.counts):
            raise ValueError(f"Initial condition shape {f0.shape} does not match grid {self.grid.counts}")
        fields = self.solve_fields(f0, (step_index, 0, FIELD))
        state = SimState(f=f0, t=float(t0), fields=fields, step_index=step_index)
        state.history.append(compute_diagnostics(f0, fields, self.layout, step_index, state.t, 0.0,
                                                 self.accessor_evaluations, self.clamped_feet))
        return state

    def next_dt(self, state: SimState) -> float:
        return compute_dt(state.fields, self.layout, self.cfl, self.dt_floor)

    def step(self, state: SimState, dt: Optional[float] = None) -> SimState:
        """Advance state in place by one CF3 step"""
        dt = self.next_dt(state) if dt is None else float(dt)
        f_next = self.rkei_cf3_step(state.f, state.t, dt, state.fields, state.step_index)
        fields_next = self.solve_fields(f_next, (state.step_index + 1, 0, FIELD))
        record = compute_diagnostics(f_next, fields_next, self.layout, state.step_index + 1, state.t + dt, dt,
                                     self.accessor_evaluations, self.clamped_feet)

        # state only changes once the whole step succeeded
        state.step_index += 1
        state.t = state.t + dt
        state.f = f_next
        state.fields = fields_next
        state.last_dt = dt
        state.history.append(record)
        logger.info(f"Step {record.step}: t={record.time:.4f} dt={dt:.4e} "
                    f"E_el={record.electric_energy:.6e} max_rank={record.max_rank} "
                    f"evals={record.accessor_evals}")
        return state

    def evolve(self, state: SimState, t_final: float, dt: Optional[float] = None) -> SimState:
        """Step until t_final, shortening the last step to land on it"""
        eps = 1e-12 * max(1.0, abs(t_final))
        while state.t < t_final - eps:
            step_dt = self.next_dt(state) if dt is None else float(dt)
            self.step(state, min(step_dt, t_final - state.t))
        return state

    def reversibility_error(self, f0: HTTensor, t_final: float, dt: Optional[float] = None) -> float:
        """Discrete L2 distance to f0 after evolving to t_final, reflecting v and evolving back.

        The backward leg replays the forward step sizes in reverse order.
        """
        forward = self.evolve(self.initialize(f0), t_final, dt)
        backward = self.initialize(reverse_velocity(forward.f, self.layout))
        for step_dt in reversed([record.dt for record in forward.history[1:]]):
            self.step(backward, step_dt)
        restored = reverse_velocity(backward.f, self.layout)
        return ht_norm(ht_sub(restored, f0)) * float(np.sqrt(self.grid.cell_volume))
