"""Two-dimensional slices of phase-space tensors for plotting"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterator, Mapping, Tuple

import numpy as np

from ..errors import ConfigurationError
from ..ht_core.ht_tensor import HTTensor, ht_entries
from ..sl_advect.grid import PhaseSpaceGrid

logger = logging.getLogger(__name__)


@dataclass
class SliceResult:
    modes: Tuple[int, int]
    names: Tuple[str, str]
    coords: Tuple[np.ndarray, np.ndarray]
    values: np.ndarray
    fixed_indices: Dict[int, int]

    def rows(self) -> Iterator[Tuple[float, float, float]]:
        """Tidy (coordinate_mu, coordinate_nu, f) triples, mu slowest"""
        for i, x in enumerate(self.coords[0]):
            for j, y in enumerate(self.coords[1]):
                yield float(x), float(y), float(self.values[i, j])


def snap_to_center(grid: PhaseSpaceGrid, mode: int, value: float) -> int:
    """Index of the nearest cell center; exact midpoints snap to the lower center"""
    q = (value - grid.lower[mode]) / grid.spacing[mode] - 0.5
    return int(np.clip(np.ceil(q - 0.5), 0, grid.counts[mode] - 1))


def extract_slice(f: HTTensor, grid: PhaseSpaceGrid, free_modes: Tuple[int, int],
                  fixed: Mapping[int, float]) -> SliceResult:
    """Real part of f on the (mu, nu) plane with every other mode snapped to fixed[mode]"""
    mu, nu = (int(m) for m in free_modes)
    if mu == nu or not (0 <= mu < f.d and 0 <= nu < f.d):
        raise ConfigurationError(f"Invalid slice modes {free_modes} for {f.d} modes")
    others = [m for m in range(f.d) if m not in (mu, nu)]
    missing = [m for m in others if m not in fixed]
    if missing:
        raise ConfigurationError(f"No fixed value for modes {missing}")

    fixed_indices = {m: snap_to_center(grid, m, float(fixed[m])) for m in others}
    n_mu, n_nu = f.shape[mu], f.shape[nu]
    indices = np.zeros((n_mu * n_nu, f.d), dtype=np.int64)
    ii, jj = np.meshgrid(np.arange(n_mu), np.arange(n_nu), indexing="ij")
    indices[:, mu] = ii.ravel()
    indices[:, nu] = jj.ravel()
    for m, i in fixed_indices.items():
        indices[:, m] = i

    values = ht_entries(f, indices).real.reshape(n_mu, n_nu)
    return SliceResult(
        modes=(mu, nu),
        names=(grid.names[mu], grid.names[nu]),
        coords=(grid.centers(mu), grid.centers(nu)),
        values=values,
        fixed_indices=fixed_indices,
    )
