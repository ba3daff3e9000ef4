"""Uniform Cartesian phase-space meshes"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence, Tuple

import numpy as np

from ..errors import ConfigurationError, ShapeMismatchError

logger = logging.getLogger(__name__)


class BoundaryKind(str, Enum):
    periodic = "periodic"
    truncated = "truncated"


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Cell-centered mesh: mode mu has N_mu cells of width (b - a) / N_mu on [a, b]"""
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]
    counts: Tuple[int, ...]
    boundary: Tuple[BoundaryKind, ...]
    names: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        d = len(self.counts)
        object.__setattr__(self, "lower", tuple(float(a) for a in self.lower))
        object.__setattr__(self, "upper", tuple(float(b) for b in self.upper))
        object.__setattr__(self, "counts", tuple(int(n) for n in self.counts))
        object.__setattr__(self, "boundary", tuple(BoundaryKind(k) for k in self.boundary))
        if not self.names:
            object.__setattr__(self, "names", tuple(f"x{mu + 1}" for mu in range(d)))
        if not (len(self.lower) == len(self.upper) == len(self.boundary) == len(self.names) == d):
            raise ShapeMismatchError("Grid bounds, counts, boundary kinds and names must have equal length")
        for mu in range(d):
            if self.counts[mu] < 1:
                raise ConfigurationError(f"Mode {mu} needs at least one cell")
            if not self.upper[mu] > self.lower[mu]:
                raise ConfigurationError(f"Mode {mu} has an empty interval [{self.lower[mu]}, {self.upper[mu]}]")

    @property
    def d(self) -> int:
        return len(self.counts)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.counts

    @property
    def lower_array(self) -> np.ndarray:
        return np.asarray(self.lower)

    @property
    def lengths(self) -> np.ndarray:
        return np.asarray(self.upper) - np.asarray(self.lower)

    @property
    def spacing(self) -> np.ndarray:
        return self.lengths / np.asarray(self.counts)

    @property
    def periodic(self) -> np.ndarray:
        return np.array([k == BoundaryKind.periodic for k in self.boundary])

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def centers(self, mode: int) -> np.ndarray:
        return self.lower[mode] + (np.arange(self.counts[mode]) + 0.5) * self.spacing[mode]

    def center_points(self, indices: np.ndarray) -> np.ndarray:
        """Coordinates of the cell centers at an (M, d) index array"""
        return self.lower_array + (np.asarray(indices) + 0.5) * self.spacing

    def sub_grid(self, modes: Sequence[int]) -> "PhaseSpaceGrid":
        modes = list(modes)
        return PhaseSpaceGrid(
            tuple(self.lower[m] for m in modes), tuple(self.upper[m] for m in modes),
            tuple(self.counts[m] for m in modes), tuple(self.boundary[m] for m in modes),
            tuple(self.names[m] for m in modes),
        )

    def confine(self, points: np.ndarray) -> Tuple[np.ndarray, int]:
        """Wrap periodic coordinates into [a, b) and clamp truncated ones to [a, b].

        Returns the confined points and the number of clamped coordinates.
        """
        points = np.array(points, dtype=np.float64, copy=True)
        lower, upper = self.lower_array, np.asarray(self.upper)
        outside = (points < lower) | (points >= upper)
        periodic = self.periodic
        wrap = outside & periodic
        if np.any(wrap):
            wrapped = lower + np.mod(points - lower, self.lengths)
            points = np.where(wrap, wrapped, points)
        clamp = ((points < lower) | (points > upper)) & ~periodic
        clamped = int(np.count_nonzero(clamp))
        if clamped:
            points = np.clip(points, lower, upper)
        return points, clamped


def locate_cell(points: np.ndarray, grid: PhaseSpaceGrid) -> np.ndarray:
    """Index of the cell containing each point; points on a face go to the lower cell"""
    q = (np.atleast_2d(points) - grid.lower_array) / grid.spacing
    cells = np.ceil(q).astype(np.int64) - 1
    return np.clip(cells, 0, np.asarray(grid.counts) - 1)


@dataclass(frozen=True)
class VlasovLayout:
    """Assignment of grid modes to spatial and velocity roles.

    velocity_modes[j] carries the velocity component paired with spatial_modes[j].
    """
    grid: PhaseSpaceGrid
    spatial_modes: Tuple[int, ...]
    velocity_modes: Tuple[int, ...]

    def __post_init__(self):
        if len(self.spatial_modes) != len(self.velocity_modes):
            raise ConfigurationError("Spatial and velocity dimensions must agree")
        if sorted(self.spatial_modes + self.velocity_modes) != list(range(self.grid.d)):
            raise ConfigurationError("Layout must assign every grid mode exactly once")
        for mu in self.spatial_modes:
            if self.grid.boundary[mu] != BoundaryKind.periodic:
                raise ConfigurationError(f"Spatial mode {mu} must be periodic")
        if tuple(sorted(self.spatial_modes)) != tuple(self.spatial_modes):
            raise ConfigurationError("Spatial modes must be listed in increasing order")

    @property
    def d_x(self) -> int:
        return len(self.spatial_modes)

    @property
    def spatial_grid(self) -> PhaseSpaceGrid:
        return self.grid.sub_grid(self.spatial_modes)

    @property
    def velocity_spacing(self) -> np.ndarray:
        return self.grid.spacing[list(self.velocity_modes)]

    @property
    def spatial_spacing(self) -> np.ndarray:
        return self.grid.spacing[list(self.spatial_modes)]

    @property
    def v_max(self) -> np.ndarray:
        return np.asarray([max(abs(self.grid.lower[m]), abs(self.grid.upper[m])) for m in self.velocity_modes])

    @classmethod
    def build(cls, d_x: int, n_cells: Sequence[int], lengths: Sequence[float], v_max: float,
              ordering: str = "paired") -> "VlasovLayout":
        """Periodic [0, L_j] spatial modes and [-v_max, v_max] velocity modes.

        ordering "paired" interleaves (x1, v1, x2, v2, ...); "grouped" lists all
        spatial modes first.
        """
        if ordering == "paired":
            spatial = tuple(2 * j for j in range(d_x))
            velocity = tuple(2 * j + 1 for j in range(d_x))
        elif ordering == "grouped":
            spatial = tuple(range(d_x))
            velocity = tuple(range(d_x, 2 * d_x))
        else:
            raise ConfigurationError(f"Unknown mode ordering: {ordering}")

        d = 2 * d_x
        lower, upper, kinds, names = [0.0] * d, [0.0] * d, [None] * d, [""] * d
        for j in range(d_x):
            x, v = spatial[j], velocity[j]
            lower[x], upper[x], kinds[x], names[x] = 0.0, float(lengths[j]), BoundaryKind.periodic, f"x{j + 1}"
            lower[v], upper[v], kinds[v], names[v] = -v_max, v_max, BoundaryKind.truncated, f"v{j + 1}"
        counts = [int(n_cells[m]) for m in range(d)] if len(n_cells) == d else [int(n_cells[0])] * d
        grid = PhaseSpaceGrid(tuple(lower), tuple(upper), tuple(counts), tuple(kinds), tuple(names))
        return cls(grid, spatial, velocity)
