"""Entry accessors - pure multi-index to value maps consumed by cross approximation"""

import logging
import threading
from abc import ABC, abstractmethod
from typing import Callable, Optional, Sequence

import numpy as np

from ..errors import ShapeMismatchError
from ..ht_core.ht_tensor import HTTensor, ht_entries
from ..ht_core.indexing import check_bounds

logger = logging.getLogger(__name__)


class EntryAccessor(ABC):
    """Lazily evaluated tensor of the given shape.

    Subclasses implement _evaluate on an already validated (M, d) int64 array and
    must be safe to call from several threads at once.
    """

    def __init__(self, shape: Sequence[int]):
        self.shape = tuple(int(n) for n in shape)
        self._lock = threading.Lock()
        self._evaluations = 0

    @property
    def d(self) -> int:
        return len(self.shape)

    @property
    def evaluation_count(self) -> int:
        return self._evaluations

    def evaluate(self, indices: np.ndarray) -> np.ndarray:
        """Values at every row of an (M, d) index array"""
        indices = check_bounds(self.shape, indices)
        with self._lock:
            self._evaluations += indices.shape[0]
        return np.asarray(self._evaluate(indices), dtype=np.complex128)

    def __call__(self, index: Sequence[int]) -> complex:
        return complex(self.evaluate(np.asarray(index, dtype=np.int64)[None, :])[0])

    @abstractmethod
    def _evaluate(self, indices: np.ndarray) -> np.ndarray:
        ...

    def pivot_hints(self) -> Optional[np.ndarray]:
        """Optional (K, d) multi-indices worth trying as pivot candidates"""
        return None

    # --- contraction ------------------------------------------------------

    def restrict(self, lo: int, hi: int, fixed: Sequence[int]) -> "EntryAccessor":
        """Accessor over modes lo..hi-1 with every other mode fixed to fixed[mode]"""
        return SubAccessor(self, lo, hi, fixed)

    def fix_right(self, left_modes: int, right_index: Sequence[int]) -> "EntryAccessor":
        """Fix the trailing modes; the result spans modes 0..left_modes-1"""
        fixed = np.zeros(self.d, dtype=np.int64)
        fixed[left_modes:] = right_index
        return self.restrict(0, left_modes, fixed)

    def fix_left(self, left_modes: int, left_index: Sequence[int]) -> "EntryAccessor":
        """Fix the leading modes; the result spans modes left_modes..d-1"""
        fixed = np.zeros(self.d, dtype=np.int64)
        fixed[:left_modes] = left_index
        return self.restrict(left_modes, self.d, fixed)


class SubAccessor(EntryAccessor):
    """Parent accessor with all modes outside [lo, hi) held fixed"""

    def __init__(self, parent: EntryAccessor, lo: int, hi: int, fixed: Sequence[int]):
        if not 0 <= lo < hi <= parent.d:
            raise ShapeMismatchError(f"Invalid mode range [{lo}, {hi}) for {parent.d} modes")
        fixed = np.asarray(fixed, dtype=np.int64)
        if fixed.shape != (parent.d,):
            raise ShapeMismatchError(f"Fixed index needs {parent.d} entries")
        super().__init__(parent.shape[lo:hi])
        self.parent = parent
        self.lo, self.hi = lo, hi
        self.fixed = fixed

    def _evaluate(self, indices: np.ndarray) -> np.ndarray:
        full = np.broadcast_to(self.fixed, (indices.shape[0], self.parent.d)).copy()
        full[:, self.lo:self.hi] = indices
        return self.parent.evaluate(full)

    def pivot_hints(self) -> Optional[np.ndarray]:
        hints = self.parent.pivot_hints()
        if hints is None:
            return None
        return np.unique(hints[:, self.lo:self.hi], axis=0)


class FunctionAccessor(EntryAccessor):
    """Wraps a vectorized callable mapping an (M, d) index array to M values"""

    def __init__(self, shape: Sequence[int], fn: Callable[[np.ndarray], np.ndarray],
                 hints: Optional[np.ndarray] = None):
        super().__init__(shape)
        self.fn = fn
        self.hints = None if hints is None else check_bounds(self.shape, hints)

    def _evaluate(self, indices: np.ndarray) -> np.ndarray:
        return self.fn(indices)

    def pivot_hints(self) -> Optional[np.ndarray]:
        return self.hints


class HTAccessor(EntryAccessor):
    """Entries of an existing HT tensor"""

    def __init__(self, tensor: HTTensor):
        super().__init__(tensor.shape)
        self.tensor = tensor

    def _evaluate(self, indices: np.ndarray) -> np.ndarray:
        return ht_entries(self.tensor, indices)


class ResidualAccessor(EntryAccessor):
    """target - approx, evaluated entrywise"""

    def __init__(self, target: EntryAccessor, approx: HTTensor):
        if tuple(target.shape) != tuple(approx.shape):
            raise ShapeMismatchError(f"Residual shapes differ: {target.shape} vs {approx.shape}")
        super().__init__(target.shape)
        self.target = target
        self.approx = approx

    def _evaluate(self, indices: np.ndarray) -> np.ndarray:
        return self.target.evaluate(indices) - ht_entries(self.approx, indices)

    def pivot_hints(self) -> Optional[np.ndarray]:
        return self.target.pivot_hints()
