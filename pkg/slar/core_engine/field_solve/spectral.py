"""Discrete wavenumbers and batched leaf-frame DFTs on periodic spatial grids"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import scipy.fft

from ...config.settings import settings
from ..errors import ShapeMismatchError
from ..ht_core.ht_tensor import HTTensor
from ..ht_core.operations import map_leaf
from ..sl_advect.grid import PhaseSpaceGrid

logger = logging.getLogger(__name__)


class DftDirection(str, Enum):
    forward = "forward"
    inverse = "inverse"


@dataclass(frozen=True)
class SpectralGrid:
    """Periodic box [0, L_mu) with N_mu points per spatial mode"""
    lengths: Tuple[float, ...]
    counts: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "lengths", tuple(float(L) for L in self.lengths))
        object.__setattr__(self, "counts", tuple(int(n) for n in self.counts))
        if len(self.lengths) != len(self.counts):
            raise ShapeMismatchError("Spectral grid lengths and counts differ in length")

    @classmethod
    def from_grid(cls, grid: PhaseSpaceGrid) -> "SpectralGrid":
        return cls(tuple(grid.lengths), grid.counts)

    @property
    def d(self) -> int:
        return len(self.counts)

    def wavenumbers(self, mode: int) -> np.ndarray:
        """2 pi m / L for m = 0, 1, ..., N/2 - 1, -N/2, ..., -1"""
        n, length = self.counts[mode], self.lengths[mode]
        return 2.0 * np.pi * scipy.fft.fftfreq(n, d=length / n)

    def k_squared(self, indices: np.ndarray) -> np.ndarray:
        """|k|^2 at frequency multi-indices (M, d)"""
        indices = np.atleast_2d(indices)
        total = np.zeros(indices.shape[0])
        for mu in range(self.d):
            total += self.wavenumbers(mu)[indices[:, mu]] ** 2
        return total

    def low_frequency_indices(self, radius: int) -> np.ndarray:
        """Array indices of all frequencies with |m_mu| <= radius in every mode, zero excluded"""
        axes = []
        for n in self.counts:
            m = np.arange(-radius, radius + 1)
            axes.append(np.unique(np.mod(m[np.abs(m) <= n // 2], n)))
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.d)
        return mesh[np.any(mesh != 0, axis=1)]


def _workers(workers: Optional[int]) -> int:
    return int(workers if workers is not None else settings.get("runtime.threads", 1))


def dft_leaves(t: HTTensor, direction: Union[str, DftDirection] = DftDirection.forward,
               workers: Optional[int] = None, modes: Optional[Sequence[int]] = None) -> HTTensor:
    """Column-wise DFT of every leaf frame (forward unnormalized, inverse scaled by 1/N)"""
    direction = DftDirection(direction)
    transform = scipy.fft.fft if direction == DftDirection.forward else scipy.fft.ifft
    n_workers = _workers(workers)
    out = t
    for mode in (range(t.d) if modes is None else modes):
        out = map_leaf(out, mode, lambda frame: transform(frame, axis=0, workers=n_workers))
    return out


def spectral_derivative(frame: np.ndarray, k: np.ndarray, workers: Optional[int] = None) -> np.ndarray:
    """d/dx of each physical-space column via multiplication by i k"""
    n_workers = _workers(workers)
    spectrum = scipy.fft.fft(frame, axis=0, workers=n_workers)
    return scipy.fft.ifft(1j * k[:, None] * spectrum, axis=0, workers=n_workers)
