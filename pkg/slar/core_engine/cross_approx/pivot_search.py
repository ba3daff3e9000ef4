"""Residual-guided recursive pivot search over a dimension tree"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Set, Tuple

import numpy as np

from ..errors import NonFiniteValueError
from ..ht_core.dimension_tree import DimensionTree
from ..ht_core.indexing import delinearize, linearize, split_shape
from .accessor import EntryAccessor
from .params import sampling_params

logger = logging.getLogger(__name__)


@dataclass
class PivotResult:
    """Pivot value and location; left/right parts split at the root of the searched tree"""
    value: complex
    index: Optional[Tuple[int, ...]]
    left_index: Tuple[int, ...] = ()
    right_index: Tuple[int, ...] = ()
    left_linear: int = -1
    right_linear: int = -1
    exhausted: bool = False
    rook: bool = False

    @property
    def magnitude(self) -> float:
        return abs(self.value)


def finite_values(values: np.ndarray, context: str) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise NonFiniteValueError(f"Non-finite residual values during {context}")
    return values


def _nth_unused(used_sorted: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """Map ranks among the unused indices to index values"""
    if used_sorted.size == 0:
        return positions
    shifted = used_sorted - np.arange(used_sorted.size)
    return positions + np.searchsorted(shifted, positions, side="right")


def fiber_argmax(res: EntryAccessor) -> PivotResult:
    """Leaf case: evaluate the whole fiber and take the largest magnitude"""
    values = finite_values(res.evaluate(np.arange(res.shape[0])[:, None]), "fiber search")
    k = int(np.argmax(np.abs(values)))
    return PivotResult(value=complex(values[k]), index=(k,))


def recursive_pivot_search(res: EntryAccessor, tree: DimensionTree,
                           used_left: Optional[Set[int]] = None,
                           used_right: Optional[Set[int]] = None,
                           candidate: Optional[Sequence[int]] = None,
                           depth_n: int = 0,
                           rng: Optional[np.random.Generator] = None) -> PivotResult:
    """Find a large-residual pivot for the root split of tree.

    Samples 3^order unused (row, column) pairs plus the optional candidate, keeps
    the largest, then alternates left/right refinement on the child subtrees for up
    to order-1 rounds, stopping early once neither side moves. Only the outermost
    call (depth_n == 0) records the chosen row/column in used_left/used_right.
    """
    if tree.d == 1:
        return fiber_argmax(res)

    rng = rng if rng is not None else np.random.default_rng(0)
    used_left = used_left if used_left is not None else set()
    used_right = used_right if used_right is not None else set()

    root = tree.nodes[tree.root]
    kl = len(tree.nodes[root.left].modes)
    shape_l, shape_r = res.shape[:kl], res.shape[kl:]
    n_left, n_right = split_shape(res.shape, kl)
    samples, rounds = sampling_params(tree.d)

    used_l = np.fromiter(sorted(used_left), dtype=np.int64, count=len(used_left))
    used_r = np.fromiter(sorted(used_right), dtype=np.int64, count=len(used_right))
    free_l, free_r = n_left - used_l.size, n_right - used_r.size
    total = free_l * free_r
    if total <= 0:
        return PivotResult(value=0j, index=None, exhausted=True)

    picks = rng.choice(total, size=min(samples, total), replace=False)
    lin_l = _nth_unused(used_l, picks // free_r)
    lin_r = _nth_unused(used_r, picks % free_r)

    extra_l, extra_r = [], []
    if candidate is not None:
        candidate = np.asarray(candidate, dtype=np.int64)
        extra_l.append(linearize(shape_l, candidate[:kl]))
        extra_r.append(linearize(shape_r, candidate[kl:]))
    if depth_n == 0:
        hints = res.pivot_hints()
        if hints is not None and len(hints):
            hint_l = linearize(shape_l, hints[:, :kl])
            hint_r = linearize(shape_r, hints[:, kl:])
            keep = ~np.isin(hint_l, used_l) & ~np.isin(hint_r, used_r)
            extra_l.extend(hint_l[keep])
            extra_r.extend(hint_r[keep])
    if extra_l:
        lin_l = np.concatenate([lin_l, np.asarray(extra_l, dtype=np.int64)])
        lin_r = np.concatenate([lin_r, np.asarray(extra_r, dtype=np.int64)])

    indices = np.hstack([delinearize(shape_l, lin_l), delinearize(shape_r, lin_r)])
    values = finite_values(res.evaluate(indices), "pivot sampling")
    best = int(np.argmax(np.abs(values)))
    i_left = tuple(int(i) for i in indices[best, :kl])
    i_right = tuple(int(i) for i in indices[best, kl:])
    value = complex(values[best])

    left_tree, right_tree = tree.subtree(root.left), tree.subtree(root.right)
    rook = False
    for _ in range(rounds):
        left_pivot = recursive_pivot_search(res.fix_right(kl, i_right), left_tree,
                                            candidate=i_left, depth_n=depth_n + 1, rng=rng)
        right_pivot = recursive_pivot_search(res.fix_left(kl, left_pivot.index), right_tree,
                                             candidate=i_right, depth_n=depth_n + 1, rng=rng)
        moved = left_pivot.index != i_left or right_pivot.index != i_right
        i_left, i_right = left_pivot.index, right_pivot.index
        value = right_pivot.value
        if not moved:
            rook = True
            break

    left_linear = int(linearize(shape_l, i_left))
    right_linear = int(linearize(shape_r, i_right))
    if depth_n == 0:
        used_left.add(left_linear)
        used_right.add(right_linear)

    logger.debug(f"Pivot {value:.3e} at {i_left + i_right} (depth {depth_n}, rook={rook})")
    return PivotResult(value=value, index=i_left + i_right, left_index=i_left, right_index=i_right,
                       left_linear=left_linear, right_linear=right_linear, rook=rook)
