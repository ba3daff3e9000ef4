"""Stage velocity fields of the Vlasov transport dx/dt = v, dv/dt = -E(x)"""

import logging
from typing import List, Sequence, Tuple

import numpy as np

from ..errors import ShapeMismatchError
from ..ht_core.ht_tensor import HTTensor
from .grid import VlasovLayout
from .reconstruction import eval_field_offgrid

logger = logging.getLogger(__name__)

FieldTerm = Tuple[float, Sequence[HTTensor]]


class VlasovStageField:
    """a(x, v) = (v_coef * v, -sum_k c_k E_k(x)), frozen in time over a stage.

    terms holds (coefficient, [E_1, ..., E_dx]) pairs, each E_j an HT tensor on the
    spatial grid. Off-grid field values use P2 reconstruction and are taken real.
    """

    def __init__(self, layout: VlasovLayout, v_coef: float, terms: Sequence[FieldTerm] = ()):
        self.layout = layout
        self.v_coef = float(v_coef)
        self.terms: List[FieldTerm] = []
        for coef, components in terms:
            if len(components) != layout.d_x:
                raise ShapeMismatchError(f"Field term has {len(components)} components, expected {layout.d_x}")
            self.terms.append((float(coef), list(components)))
        self._spatial_grid = layout.spatial_grid
        self._x = list(layout.spatial_modes)
        self._v = list(layout.velocity_modes)

    @property
    def coefficients(self) -> List[float]:
        return [coef for coef, _ in self.terms]

    def acceleration(self, x: np.ndarray) -> np.ndarray:
        """-sum_k c_k E_k at spatial points x, shape (M, d_x)"""
        accel = np.zeros((x.shape[0], self.layout.d_x))
        for coef, components in self.terms:
            if coef == 0.0:
                continue
            accel -= coef * eval_field_offgrid(components, x, self._spatial_grid)
        return accel

    def __call__(self, points: np.ndarray, t: float) -> np.ndarray:
        out = np.zeros_like(points, dtype=np.float64)
        out[:, self._x] = self.v_coef * points[:, self._v]
        if self.terms:
            x, _ = self._spatial_grid.confine(points[:, self._x])
            out[:, self._v] = self.acceleration(x)
        return out

    def __repr__(self) -> str:
        return f"VlasovStageField(v_coef={self.v_coef}, coefficients={self.coefficients})"
