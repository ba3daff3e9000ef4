"""Local semi-Lagrangian finite-difference solver exposed as an entry accessor"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from ...config.settings import settings
from ..cross_approx.accessor import EntryAccessor
from ..errors import ShapeMismatchError
from ..ht_core.ht_tensor import HTTensor
from .grid import PhaseSpaceGrid, locate_cell
from .reconstruction import gather_stencil, p2_coefficients, p2_evaluate
from .tracing import VelocityField, trace_rk3

logger = logging.getLogger(__name__)


class SemiLagrangianAccessor(EntryAccessor):
    """f^{n+1} at grid centers: trace back to t_n, reconstruct f^n there with P2.

    Large batches are split into chunks of batch_chunk rows and evaluated on a
    thread pool. Clamped characteristic feet are counted, not rejected.
    """

    def __init__(self, f_prev: HTTensor, grid: PhaseSpaceGrid, t_n: float, t_next: float,
                 field: VelocityField, threads: Optional[int] = None,
                 batch_chunk: Optional[int] = None):
        if tuple(f_prev.shape) != tuple(grid.counts):
            raise ShapeMismatchError(f"Tensor shape {f_prev.shape} does not match grid {grid.counts}")
        super().__init__(grid.counts)
        self.f_prev = f_prev
        self.grid = grid
        self.t_n = float(t_n)
        self.t_next = float(t_next)
        self.field = field
        runtime = settings.get_runtime_config()
        self.threads = int(threads if threads is not None else runtime.get("threads", 1))
        self.batch_chunk = int(batch_chunk if batch_chunk is not None else runtime.get("batch_chunk", 4096))
        self._clamp_lock = threading.Lock()
        self._clamped = 0

    @property
    def clamped_feet(self) -> int:
        """Number of foot coordinates clamped into the velocity box so far"""
        return self._clamped

    def _solve(self, indices: np.ndarray) -> np.ndarray:
        centers = self.grid.center_points(indices)
        feet, clamped = trace_rk3(centers, self.t_next, self.t_n, self.field, self.grid)
        if clamped:
            with self._clamp_lock:
                self._clamped += clamped
        cells = locate_cell(feet, self.grid)
        xi = (feet - self.grid.center_points(cells)) / self.grid.spacing
        coeffs = p2_coefficients(gather_stencil(self.f_prev, self.grid, cells), self.grid.d)
        return p2_evaluate(coeffs, xi)

    def _evaluate(self, indices: np.ndarray) -> np.ndarray:
        m = indices.shape[0]
        if self.threads <= 1 or m <= self.batch_chunk:
            return self._solve(indices)
        chunks = [indices[i:i + self.batch_chunk] for i in range(0, m, self.batch_chunk)]
        with ThreadPoolExecutor(max_workers=self.threads) as executor:
            parts = list(executor.map(self._solve, chunks))
        return np.concatenate(parts)


def sl_accessor(f_prev: HTTensor, grid: PhaseSpaceGrid, t_n: float, t_next: float,
                field: VelocityField, **kwargs) -> SemiLagrangianAccessor:
    return SemiLagrangianAccessor(f_prev, grid, t_n, t_next, field, **kwargs)
