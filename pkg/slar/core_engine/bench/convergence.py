"""Convergence studies: exact-solution rotation and VP reversibility"""

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..cross_approx.params import AcaParams
from ..ht_core.dimension_tree import DimensionTree, TreeStrategy
from ..ht_core.ht_tensor import HTTensor, ht_rank_one
from ..sl_advect.grid import BoundaryKind, PhaseSpaceGrid, VlasovLayout
from ..sl_advect.sl_accessor import SemiLagrangianAccessor
from ..sl_advect.tracing import RotationField
from ..vp_driver.solver import VlasovPoissonSolver
from .initial_conditions import domain_lengths, landau_initial_condition

logger = logging.getLogger(__name__)


def fit_order(scales: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(scale)"""
    scales, errors = np.asarray(scales, dtype=float), np.asarray(errors, dtype=float)
    if scales.size < 2:
        raise ValueError("Need at least two levels to fit an order")
    slope, _ = np.polyfit(np.log(scales), np.log(errors), 1)
    return float(slope)


@dataclass
class ConvergenceTable:
    kind: str
    scales: List[float] = field(default_factory=list)
    errors: List[float] = field(default_factory=list)
    labels: List[str] = field(default_factory=list)
    seconds: List[float] = field(default_factory=list)

    def add(self, label: str, scale: float, error: float, seconds: float = 0.0):
        self.labels.append(label)
        self.scales.append(float(scale))
        self.errors.append(float(error))
        self.seconds.append(float(seconds))
        logger.info(f"{self.kind} convergence {label}: error {error:.4e}")

    @property
    def fitted_order(self) -> float:
        return fit_order(self.scales, self.errors)

    def pairwise_orders(self) -> List[Optional[float]]:
        orders: List[Optional[float]] = [None]
        for i in range(1, len(self.errors)):
            orders.append(float(np.log(self.errors[i - 1] / self.errors[i])
                                / np.log(self.scales[i - 1] / self.scales[i])))
        return orders

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind,
            'levels': [
                {'label': lab, 'scale': s, 'error': e, 'order': o, 'seconds': t}
                for lab, s, e, o, t in zip(self.labels, self.scales, self.errors,
                                           self.pairwise_orders(), self.seconds)
            ],
            'fitted_order': self.fitted_order if len(self.errors) > 1 else None,
        }


# --- rotation with exact solution -------------------------------------------

def gaussian_blob(grid: PhaseSpaceGrid, center: Tuple[float, float], width: float) -> HTTensor:
    """Separable exp(-|x - c|^2 / (2 w^2)) on a two-mode grid"""
    factors = [np.exp(-0.5 * ((grid.centers(m) - center[m]) / width) ** 2) for m in range(2)]
    return ht_rank_one(DimensionTree.build(2), factors)


def rotation_error(n: int, half_width: float = 4.0, center: Tuple[float, float] = (1.0, 0.5),
                   width: float = 0.6, dt_per_h: float = 0.5, omega: float = 1.0) -> float:
    """Discrete L2 error of one SL step of a rigidly rotated Gaussian"""
    grid = PhaseSpaceGrid((-half_width, -half_width), (half_width, half_width), (n, n),
                          (BoundaryKind.truncated, BoundaryKind.truncated))
    h = float(grid.spacing[0])
    dt = dt_per_h * h
    field_ = RotationField(omega)
    f0 = gaussian_blob(grid, center, width)
    acc = SemiLagrangianAccessor(f0, grid, 0.0, dt, field_)

    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    indices = np.column_stack([ii.ravel(), jj.ravel()])
    numeric = acc.evaluate(indices).real

    feet = field_.exact_foot(grid.center_points(indices), dt)
    exact = np.exp(-0.5 * np.sum(((feet - np.asarray(center)) / width) ** 2, axis=1))
    return float(np.sqrt(np.sum((numeric - exact) ** 2) * grid.cell_volume))


def rotation_study(levels: Sequence[int] = (32, 64, 128), **kwargs) -> ConvergenceTable:
    table = ConvergenceTable(kind="rotation")
    for n in levels:
        start = time.perf_counter()
        error = rotation_error(n, **kwargs)
        table.add(f"N={n}", 1.0 / n, error, time.perf_counter() - start)
    return table


# --- VP reversibility ---------------------------------------------------------

@dataclass
class LandauCase:
    """Reversibility test case: Landau data on a Vlasov layout"""
    d_x: int = 2
    alpha: float = 0.5
    k: float = 0.5
    v_max: float = 2.0 * np.pi
    ordering: str = "paired"
    strategy: TreeStrategy = TreeStrategy.balanced
    gamma: float = 0.1
    r_max: Optional[int] = None

    def build(self, n: int, eps_base: float, cfl: float) -> Tuple[VlasovPoissonSolver, HTTensor]:
        layout = VlasovLayout.build(self.d_x, [n], domain_lengths(self.d_x, self.k), self.v_max, self.ordering)
        tree = DimensionTree.build(2 * self.d_x, self.strategy)
        params = AcaParams(eps_base=eps_base, gamma=self.gamma, r_max=self.r_max)
        solver = VlasovPoissonSolver(layout, params, cfl=cfl)
        return solver, landau_initial_condition(layout, tree, self.alpha, self.k)


def reversibility_error(case: LandauCase, n: int, eps_base: float, cfl: float, t_final: float) -> float:
    solver, f0 = case.build(n, eps_base, cfl)
    return solver.reversibility_error(f0, t_final)


def spatial_study(case: LandauCase, levels: Sequence[int] = (16, 32, 64),
                  tolerances: Sequence[float] = (1e-4, 1e-5, 1e-6), cfl: float = 1.0,
                  t_final: float = 0.5) -> ConvergenceTable:
    """Simultaneous space/time refinement: N doubles, dt follows through the CFL rule"""
    if len(tolerances) != len(levels):
        raise ValueError("Need one tolerance per level")
    table = ConvergenceTable(kind="spatial")
    for n, eps in zip(levels, tolerances):
        start = time.perf_counter()
        error = reversibility_error(case, n, eps, cfl, t_final)
        table.add(f"N={n}", 1.0 / n, error, time.perf_counter() - start)
    return table


def temporal_study(case: LandauCase, n: int = 64, cfls: Sequence[float] = (2.0, 4.0, 8.0),
                   eps_base: float = 1e-6, t_final: float = 0.5) -> ConvergenceTable:
    """CFL sweep at a fixed mesh and tolerance"""
    table = ConvergenceTable(kind="temporal")
    for cfl in cfls:
        start = time.perf_counter()
        error = reversibility_error(case, n, eps_base, cfl, t_final)
        table.add(f"CFL={cfl:g}", cfl, error, time.perf_counter() - start)
    return table
