"""Hierarchical Tucker adaptive cross approximation (HTACA)"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..ht_core.dimension_tree import DimensionTree
from ..ht_core.ht_tensor import HTTensor, ht_zeros
from ..ht_core.indexing import split_shape
from ..ht_core.operations import ht_add, ht_join
from ..ht_core.truncation import ht_norm, ht_truncate
from .accessor import EntryAccessor, ResidualAccessor
from .params import AcaParams, tolerance_at_depth
from .pivot_search import finite_values, recursive_pivot_search

logger = logging.getLogger(__name__)


@dataclass
class HTACAStats:
    """Counters collected over one or more HTACA calls"""
    calls: int = 0
    evaluations: int = 0
    root_corrections: int = 0
    subtree_loops: int = 0
    saturated: int = 0
    exhausted: int = 0
    pivot_history: List[List[complex]] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def merge(self, other: "HTACAStats"):
        self.calls += other.calls
        self.evaluations += other.evaluations
        self.root_corrections += other.root_corrections
        self.subtree_loops += other.subtree_loops
        self.saturated += other.saturated
        self.exhausted += other.exhausted
        self.pivot_history.extend(other.pivot_history)
        self.warnings.extend(other.warnings)

    def to_dict(self) -> dict:
        return {
            'calls': self.calls,
            'evaluations': self.evaluations,
            'root_corrections': self.root_corrections,
            'subtree_loops': self.subtree_loops,
            'saturated': self.saturated,
            'exhausted': self.exhausted,
            'warnings': list(self.warnings),
        }


@dataclass
class _CallContext:
    tree_depth: int
    rng: np.random.Generator
    estimate: Optional[float] = None
    pivots: List[complex] = field(default_factory=list)


def make_rng(seed: int, stream: Sequence[int] = ()) -> np.random.Generator:
    """Counter-based generator keyed by (seed, stream) so calls can be replayed independently"""
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(sequence))


def _safe_sign(p: complex) -> complex:
    return p / abs(p) if p != 0 else 1.0


class HierarchicalCrossApproximator:
    """Builds HT tensors from entry accessors with rank-one hierarchical corrections"""

    def __init__(self, params: AcaParams):
        self.params = params
        self.stats = HTACAStats()

    def approximate(self, acc: EntryAccessor, tree: DimensionTree,
                    stream: Sequence[int] = ()) -> HTTensor:
        """Approximate acc over tree to relative accuracy eps_base"""
        if len(acc.shape) != tree.d:
            raise ValueError(f"Accessor shape {acc.shape} does not fit a {tree.d}-mode tree")

        before = acc.evaluation_count
        ctx = _CallContext(tree_depth=tree.depth, rng=make_rng(self.params.rng_seed, stream))
        approx = self._approximate(acc, tree, ctx, top=True)

        if tree.d > 1:
            approx = ht_truncate(approx, self.params.eps_base * ht_norm(approx),
                                 self.params.rank_floors(tree), self.params.r_max)

        self.stats.calls += 1
        self.stats.evaluations += acc.evaluation_count - before
        self.stats.pivot_history.append(list(ctx.pivots))
        logger.debug(f"HTACA done: ranks {approx.ranks()}, {acc.evaluation_count - before} evaluations")
        return approx

    def _approximate(self, acc: EntryAccessor, tree: DimensionTree, ctx: _CallContext,
                     top: bool = False) -> HTTensor:
        if tree.d == 1:
            fiber = finite_values(acc.evaluate(np.arange(acc.shape[0])[:, None]), "leaf fiber")
            return HTTensor(tree, acc.shape, {0: fiber[:, None]}, {})

        params = self.params
        root = tree.nodes[tree.root]
        kl = len(tree.nodes[root.left].modes)
        left_tree, right_tree = tree.subtree(root.left), tree.subtree(root.right)
        cap = params.correction_cap(*split_shape(acc.shape, kl))
        floors = params.rank_floors(tree)

        approx = ht_zeros(tree, acc.shape)
        used_left, used_right = set(), set()
        norm_estimate = None
        corrections = 0
        self.stats.subtree_loops += 1

        while True:
            residual = ResidualAccessor(acc, approx)
            pivot = recursive_pivot_search(residual, tree, used_left, used_right, None, 0, ctx.rng)
            if pivot.exhausted:
                self.stats.exhausted += 1
                break

            p = pivot.value
            if top:
                ctx.pivots.append(p)
                if ctx.estimate is None:
                    ctx.estimate = abs(p)
            eps_c = tolerance_at_depth(params, ctx.tree_depth, tree.depth, ctx.estimate or 0.0)
            corrections += 1

            if p != 0:
                h_left = self._approximate(residual.fix_right(kl, pivot.right_index), left_tree, ctx)
                h_right = self._approximate(residual.fix_left(kl, pivot.left_index), right_tree, ctx)
                scale = 1.0 / (p + _safe_sign(p) * params.pivot_safeguard)
                correction = ht_join(h_left, h_right, scale)
                if norm_estimate is None:
                    norm_estimate = ht_norm(correction)
                approx = ht_truncate(ht_add(approx, correction),
                                     params.local_truncation_factor * norm_estimate,
                                     floors, params.r_max)
                if top:
                    self.stats.root_corrections += 1

            if not (abs(p) > eps_c or corrections < params.r_hash_min):
                break
            if corrections >= cap:
                if abs(p) > eps_c:
                    message = (f"Correction cap {cap} reached on a {tree.d}-mode subtree "
                               f"with pivot {abs(p):.3e} > tolerance {eps_c:.3e}")
                    logger.warning(message)
                    self.stats.saturated += 1
                    self.stats.warnings.append(message)
                break

        return approx


def htaca(acc: EntryAccessor, tree: DimensionTree, params: AcaParams,
          stream: Sequence[int] = (), stats: Optional[HTACAStats] = None) -> HTTensor:
    """Functional entry point; stats, if given, accumulates counters of this call"""
    approximator = HierarchicalCrossApproximator(params)
    result = approximator.approximate(acc, tree, stream)
    if stats is not None:
        stats.merge(approximator.stats)
    return result
