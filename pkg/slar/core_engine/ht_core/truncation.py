"""Orthogonalization, node singular values and leaves-to-root HSVD truncation"""

import logging
import math
from typing import Dict, Mapping, Optional, Tuple, Union

import numpy as np
import scipy.linalg

from .ht_tensor import DTYPE, HTTensor, from_node_arrays

logger = logging.getLogger(__name__)

RankBound = Union[None, int, Mapping[int, int]]


def ht_orthogonalize(t: HTTensor) -> HTTensor:
    """Equivalent HTD whose non-root frames all have orthonormal columns"""
    tree = t.tree
    if tree.d == 1:
        return t

    arrays: Dict[int, np.ndarray] = {}
    factors: Dict[int, np.ndarray] = {}
    for node_id in tree.postorder():
        node = tree.nodes[node_id]
        if node.is_leaf:
            q, r = scipy.linalg.qr(t.frames[node_id], mode="economic")
            arrays[node_id], factors[node_id] = q, r
            continue
        b3 = np.einsum("xa,yb,abc->xyc", factors.pop(node.left), factors.pop(node.right),
                       t.transfer_tensor(node_id))
        matrix = b3.reshape(-1, b3.shape[2], order="F")
        if node_id == tree.root:
            arrays[node_id] = matrix
        else:
            q, r = scipy.linalg.qr(matrix, mode="economic")
            arrays[node_id], factors[node_id] = q, r
    return from_node_arrays(tree, t.shape, arrays)


def ht_norm(t: HTTensor) -> float:
    """Frobenius norm from the orthogonalized root transfer"""
    orth = ht_orthogonalize(t)
    root = orth.tree.root
    if orth.tree.nodes[root].is_leaf:
        return float(np.linalg.norm(orth.frames[root]))
    return float(np.linalg.norm(orth.transfers[root]))


def _gramian_factors(orth: HTTensor) -> Dict[int, np.ndarray]:
    """Factors R_alpha with reduced Gramian G_alpha = R^H R, root to leaves.

    Requires an orthogonalized tensor. Each factor is obtained by an SVD of the
    stacked parent data, so singular values stay accurate to machine precision
    instead of its square root.
    """
    tree = orth.tree
    factors = {tree.root: np.ones((1, 1), dtype=DTYPE)}
    for node_id, node in enumerate(tree.nodes):
        if node.is_leaf:
            continue
        r_factor = factors[node_id]
        b3 = orth.transfer_tensor(node_id)
        left_stack = np.einsum("abc,kc->abk", b3, r_factor.conj())
        right_stack = np.einsum("abc,kc->bak", b3, r_factor.conj())
        for child, stack in ((node.left, left_stack), (node.right, right_stack)):
            y = stack.reshape(stack.shape[0], -1).conj().T
            _, s, vh = scipy.linalg.svd(y, full_matrices=False)
            factors[child] = s[:, None] * vh
    return factors


def _node_svd(r_factor: np.ndarray, rank: int) -> Tuple[np.ndarray, np.ndarray]:
    """Singular values (padded to rank) and a full unitary basis of the node frame"""
    _, s, vh = scipy.linalg.svd(r_factor, full_matrices=True)
    sigma = np.zeros(rank)
    sigma[:s.size] = s
    return sigma, vh.conj().T


def ht_gramians(t: HTTensor) -> Dict[int, np.ndarray]:
    """Reduced Gramians G_alpha = R^H R of the orthogonalized tensor, root excluded"""
    orth = ht_orthogonalize(t)
    if orth.d == 1:
        return {}
    return {
        node_id: factor.conj().T @ factor
        for node_id, factor in _gramian_factors(orth).items() if node_id != orth.tree.root
    }


def ht_singular_values(t: HTTensor) -> Dict[int, np.ndarray]:
    """Singular values of every non-root matricization, descending"""
    orth = ht_orthogonalize(t)
    factors = _gramian_factors(orth) if orth.d > 1 else {}
    return {
        node_id: _node_svd(factor, orth.rank(node_id))[0]
        for node_id, factor in factors.items() if node_id != orth.tree.root
    }


def _bound(bound: RankBound, node_id: int, default: Optional[int]) -> Optional[int]:
    if bound is None:
        return default
    if isinstance(bound, Mapping):
        return bound.get(node_id, default)
    return int(bound)


def retained_rank(sigma: np.ndarray, node_tol: float, r_min: int = 1, r_max: Optional[int] = None) -> int:
    """Smallest k whose singular-value tail is within node_tol, clamped to [r_min, r_max]"""
    tails = np.sqrt(np.concatenate([np.cumsum((sigma ** 2)[::-1])[::-1], [0.0]]))
    k = int(np.argmax(tails <= node_tol))
    k = max(k, r_min)
    if r_max is not None:
        k = min(k, r_max)
    return max(1, min(k, sigma.size))


def ht_truncate(t: HTTensor, abs_tol: float, r_min: RankBound = 1, r_max: RankBound = None) -> HTTensor:
    """Leaves-to-root HSVD truncation to Frobenius accuracy abs_tol.

    Each of the 2d-3 non-root nodes gets the budget abs_tol / sqrt(2d-3). r_min and
    r_max are either one integer for every node or a node-id -> rank mapping.
    """
    tree = t.tree
    if tree.d == 1:
        return t
    if abs_tol < 0:
        raise ValueError(f"abs_tol must be non-negative, got {abs_tol}")

    orth = ht_orthogonalize(t)
    factors = _gramian_factors(orth)
    node_tol = abs_tol / math.sqrt(2 * tree.d - 3) if tree.d > 1 else abs_tol

    bases = {tree.root: np.ones((1, 1), dtype=DTYPE)}
    for node_id in range(len(tree)):
        if node_id == tree.root:
            continue
        rank = orth.rank(node_id)
        sigma, basis = _node_svd(factors[node_id], rank)
        k = retained_rank(sigma, node_tol, _bound(r_min, node_id, 1), _bound(r_max, node_id, None))
        bases[node_id] = basis[:, :k]

    arrays = {}
    for node_id, node in enumerate(tree.nodes):
        if node.is_leaf:
            arrays[node_id] = orth.frames[node_id] @ bases[node_id]
        else:
            b3 = np.einsum("ax,by,abc,cz->xyz", bases[node.left].conj(), bases[node.right].conj(),
                           orth.transfer_tensor(node_id), bases[node_id])
            arrays[node_id] = b3.reshape(-1, b3.shape[2], order="F")

    truncated = from_node_arrays(tree, t.shape, arrays)
    logger.debug(f"HSVD truncation: max rank {t.max_rank()} -> {truncated.max_rank()} (tol {abs_tol:.3e})")
    return truncated
