"""Backward characteristic tracing"""

import logging
from typing import Optional, Protocol, Sequence, Tuple, runtime_checkable

import numpy as np

from ..errors import NonFiniteValueError, ShapeMismatchError
from .grid import PhaseSpaceGrid

logger = logging.getLogger(__name__)


@runtime_checkable
class VelocityField(Protocol):
    """a(x, t) for a batch of points: (M, d) array in, (M, d) array out"""

    def __call__(self, points: np.ndarray, t: float) -> np.ndarray:
        ...


class ZeroField:
    def __call__(self, points: np.ndarray, t: float) -> np.ndarray:
        return np.zeros_like(points, dtype=np.float64)


class ConstantField:
    """Uniform drift a0 in every point"""

    def __init__(self, velocity: Sequence[float]):
        self.velocity = np.asarray(velocity, dtype=np.float64)

    def __call__(self, points: np.ndarray, t: float) -> np.ndarray:
        if points.shape[1] != self.velocity.size:
            raise ShapeMismatchError(f"Field has {self.velocity.size} components, points have {points.shape[1]}")
        return np.broadcast_to(self.velocity, points.shape).copy()


class RotationField:
    """Rigid rotation a = omega * (-(x2 - c2), x1 - c1) in the (first, second) mode plane"""

    def __init__(self, omega: float = 1.0, center: Tuple[float, float] = (0.0, 0.0),
                 modes: Tuple[int, int] = (0, 1)):
        self.omega = float(omega)
        self.center = np.asarray(center, dtype=np.float64)
        self.modes = modes

    def __call__(self, points: np.ndarray, t: float) -> np.ndarray:
        p, q = self.modes
        out = np.zeros_like(points, dtype=np.float64)
        out[:, p] = -self.omega * (points[:, q] - self.center[1])
        out[:, q] = self.omega * (points[:, p] - self.center[0])
        return out

    def exact_foot(self, points: np.ndarray, dt: float) -> np.ndarray:
        """Exact backward image after time dt"""
        p, q = self.modes
        angle = -self.omega * dt
        c, s = np.cos(angle), np.sin(angle)
        out = np.array(points, dtype=np.float64, copy=True)
        x1, x2 = points[:, p] - self.center[0], points[:, q] - self.center[1]
        out[:, p] = self.center[0] + c * x1 - s * x2
        out[:, q] = self.center[1] + s * x1 + c * x2
        return out


def trace_rk3(points: np.ndarray, t_start: float, t_end: float, field: VelocityField,
              grid: Optional[PhaseSpaceGrid] = None) -> Tuple[np.ndarray, int]:
    """Integrate dx/dt = a(x, t) from t_start back to t_end with Kutta's third-order scheme.

    With a grid, periodic coordinates of the foot are wrapped into the domain and
    truncated ones are clamped. Returns the feet and the number of clamped coordinates.
    """
    if t_end > t_start:
        raise ValueError(f"Backward tracing needs t_end <= t_start, got {t_start} -> {t_end}")
    x = np.atleast_2d(np.asarray(points, dtype=np.float64))
    h = t_end - t_start

    k1 = field(x, t_start)
    k2 = field(x + 0.5 * h * k1, t_start + 0.5 * h)
    k3 = field(x - h * k1 + 2.0 * h * k2, t_start + h)
    foot = x + (h / 6.0) * (k1 + 4.0 * k2 + k3)

    if not np.all(np.isfinite(foot)):
        raise NonFiniteValueError("Characteristic foot is not finite")
    if grid is None:
        return foot, 0
    return grid.confine(foot)
