"""Adaptive cross approximation of matrices given by entry access"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..errors import ShapeMismatchError
from .accessor import EntryAccessor
from .params import sampling_params
from .pivot_search import finite_values

logger = logging.getLogger(__name__)


@dataclass
class MatrixAcaResult:
    """Skeleton A ~ left @ right built from the selected rows and columns"""
    rows: List[int]
    cols: List[int]
    left: np.ndarray
    right: np.ndarray
    pivots: List[complex] = field(default_factory=list)
    saturated: bool = False
    exhausted: bool = False

    @property
    def rank(self) -> int:
        return len(self.rows)

    def approximation(self) -> np.ndarray:
        return self.left @ self.right


def matrix_aca(acc: EntryAccessor, tol: float, max_rank: Optional[int] = None,
               rng: Optional[np.random.Generator] = None,
               samples: Optional[int] = None, rounds: Optional[int] = None) -> MatrixAcaResult:
    """Greedy rank-one updates A_k = A_{k-1} + R(:, j) R(i, :) / R(i, j).

    Each step samples candidates among unused rows/columns, alternates column and
    row maximization until the pivot stops moving or the round budget is spent, and
    stops once the pivot magnitude drops below tol.
    """
    if acc.d != 2:
        raise ShapeMismatchError(f"matrix_aca needs a 2-mode accessor, got shape {acc.shape}")
    n_rows, n_cols = acc.shape
    default_samples, default_rounds = sampling_params(2)
    samples = default_samples if samples is None else samples
    rounds = default_rounds if rounds is None else rounds
    max_rank = min(n_rows, n_cols) if max_rank is None else max_rank
    rng = rng if rng is not None else np.random.default_rng(0)

    left = np.zeros((n_rows, 0), dtype=np.complex128)
    right = np.zeros((0, n_cols), dtype=np.complex128)
    result = MatrixAcaResult(rows=[], cols=[], left=left, right=right)
    all_rows, all_cols = np.arange(n_rows), np.arange(n_cols)

    def column(j: int) -> np.ndarray:
        values = acc.evaluate(np.column_stack([all_rows, np.full(n_rows, j)]))
        return finite_values(values - left @ right[:, j], "column search")

    def row(i: int) -> np.ndarray:
        values = acc.evaluate(np.column_stack([np.full(n_cols, i), all_cols]))
        return finite_values(values - left[i, :] @ right, "row search")

    while True:
        if result.rank >= max_rank:
            result.saturated = True
            break
        free_rows = np.setdiff1d(all_rows, result.rows)
        free_cols = np.setdiff1d(all_cols, result.cols)
        total = free_rows.size * free_cols.size
        if total == 0:
            result.exhausted = True
            break

        picks = rng.choice(total, size=min(samples, total), replace=False)
        cand = np.column_stack([free_rows[picks // free_cols.size], free_cols[picks % free_cols.size]])
        values = acc.evaluate(cand) - np.einsum("mk,km->m", left[cand[:, 0]], right[:, cand[:, 1]])
        best = int(np.argmax(np.abs(finite_values(values, "sampling"))))
        i, j = int(cand[best, 0]), int(cand[best, 1])

        col_values = column(j)
        for _ in range(rounds):
            i_new = int(np.argmax(np.abs(col_values)))
            row_values = row(i_new)
            j_new = int(np.argmax(np.abs(row_values)))
            moved = (i_new, j_new) != (i, j)
            i, j = i_new, j_new
            if not moved:
                break
            col_values = column(j)
        row_values = row(i)
        pivot = row_values[j]

        if abs(pivot) < tol or pivot == 0:
            break
        left = np.hstack([left, (col_values / pivot)[:, None]])
        right = np.vstack([right, row_values[None, :]])
        result.rows.append(i)
        result.cols.append(j)
        result.pivots.append(complex(pivot))
        logger.debug(f"ACA step {result.rank}: pivot {abs(pivot):.3e} at ({i}, {j})")

    result.left, result.right = left, right
    return result
