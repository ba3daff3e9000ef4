"""Index arithmetic between multi-indices and column-major linear indices"""

from typing import Sequence, Tuple

import numpy as np

from ..errors import IndexBoundsError, ShapeMismatchError


def mode_strides(shape: Sequence[int]) -> np.ndarray:
    """Running products J of preceding mode sizes (first mode fastest)"""
    strides = np.ones(len(shape), dtype=np.int64)
    if len(shape) > 1:
        strides[1:] = np.cumprod(np.asarray(shape[:-1], dtype=np.int64))
    return strides


def check_bounds(shape: Sequence[int], indices: np.ndarray) -> np.ndarray:
    """Validate an (M, k) or (k,) integer index array against shape"""
    indices = np.asarray(indices)
    if indices.ndim == 1:
        indices = indices[None, :]
    if indices.shape[-1] != len(shape):
        raise ShapeMismatchError(f"Index has {indices.shape[-1]} modes, tensor has {len(shape)}")
    if not np.issubdtype(indices.dtype, np.integer):
        raise IndexBoundsError(f"Indices must be integers, got dtype {indices.dtype}")
    if indices.size and (np.any(indices < 0) or np.any(indices >= np.asarray(shape))):
        bad = indices[np.any((indices < 0) | (indices >= np.asarray(shape)), axis=1)][0]
        raise IndexBoundsError(f"Index {tuple(int(i) for i in bad)} outside shape {tuple(shape)}")
    return indices.astype(np.int64, copy=False)


def linearize(shape: Sequence[int], multi_index) -> np.ndarray:
    """Map 0-based multi-indices over shape to 0-based linear indices.

    Accepts a single index (returns a scalar) or an (M, k) array.
    """
    single = np.ndim(multi_index) == 1
    indices = check_bounds(shape, multi_index)
    linear = indices @ mode_strides(shape)
    return int(linear[0]) if single else linear


def delinearize(shape: Sequence[int], linear) -> np.ndarray:
    """Inverse of linearize; returns (k,) for a scalar or (M, k) for an array"""
    single = np.ndim(linear) == 0
    linear = np.atleast_1d(np.asarray(linear, dtype=np.int64))
    total = int(np.prod(shape, dtype=np.int64))
    if linear.size and (linear.min() < 0 or linear.max() >= total):
        raise IndexBoundsError(f"Linear index outside [0, {total}) for shape {tuple(shape)}")
    out = np.empty((linear.size, len(shape)), dtype=np.int64)
    rest = linear.copy()
    for mu, n in enumerate(shape):
        out[:, mu] = rest % n
        rest //= n
    return out[0] if single else out


def split_shape(shape: Sequence[int], left_modes: int) -> Tuple[int, int]:
    """Sizes of the row and column index spaces of a two-way matricization"""
    return int(np.prod(shape[:left_modes], dtype=np.int64)), int(np.prod(shape[left_modes:], dtype=np.int64))
