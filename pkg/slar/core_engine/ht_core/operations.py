"""Structure-changing HT algebra: sums, scaling, leaf transforms, contraction, squeeze"""

import logging
from typing import Callable, Dict, Iterable, Sequence, Union

import numpy as np

from ..errors import ShapeMismatchError
from .dimension_tree import DimensionTree, join_nested
from .ht_tensor import DTYPE, HTTensor, from_node_arrays, require_same_structure

logger = logging.getLogger(__name__)


def ht_add(a: HTTensor, b: HTTensor) -> HTTensor:
    """Exact sum via block-diagonal transfers; node ranks add up"""
    require_same_structure(a, b)
    tree = a.tree
    if tree.d == 1:
        return HTTensor(tree, a.shape, {0: a.frames[0] + b.frames[0]}, {})

    arrays = {}
    for node_id, node in enumerate(tree.nodes):
        if node.is_leaf:
            arrays[node_id] = np.hstack([a.frames[node_id], b.frames[node_id]])
            continue
        ba, bb = a.transfer_tensor(node_id), b.transfer_tensor(node_id)
        la, ra, ca = ba.shape
        lb, rb, cb = bb.shape
        if node_id == tree.root:
            block = np.zeros((la + lb, ra + rb, 1), dtype=DTYPE)
            block[:la, :ra, :] = ba
            block[la:, ra:, :] = bb
        else:
            block = np.zeros((la + lb, ra + rb, ca + cb), dtype=DTYPE)
            block[:la, :ra, :ca] = ba
            block[la:, ra:, ca:] = bb
        arrays[node_id] = block.reshape(-1, block.shape[2], order="F")
    return from_node_arrays(tree, a.shape, arrays)


def ht_scale(a: HTTensor, c: complex) -> HTTensor:
    """Multiply by a scalar; only the root data changes"""
    root = a.tree.root
    if a.tree.nodes[root].is_leaf:
        return HTTensor(a.tree, a.shape, {root: a.frames[root] * c}, {})
    transfers = dict(a.transfers)
    transfers[root] = a.transfers[root] * c
    return HTTensor(a.tree, a.shape, dict(a.frames), transfers)


def ht_sub(a: HTTensor, b: HTTensor) -> HTTensor:
    return ht_add(a, ht_scale(b, -1.0))


def map_leaf(t: HTTensor, mode: int, fn: Callable[[np.ndarray], np.ndarray]) -> HTTensor:
    """Replace the frame of mode's leaf by fn(frame); the column count must be kept"""
    if not 0 <= mode < t.d:
        raise ShapeMismatchError(f"Mode {mode} outside a {t.d}-mode tensor")
    leaf = t.tree.leaf_of(mode)
    frame = np.asarray(fn(np.asarray(t.frames[leaf])), dtype=DTYPE)
    if frame.ndim != 2 or frame.shape[1] != t.frames[leaf].shape[1]:
        raise ShapeMismatchError(f"Leaf map changed the rank of mode {mode}")
    frames = dict(t.frames)
    frames[leaf] = frame
    shape = list(t.shape)
    shape[mode] = frame.shape[0]
    return HTTensor(t.tree, tuple(shape), frames, dict(t.transfers))


def leaf_transform(t: HTTensor, mode: int, matrix: np.ndarray) -> HTTensor:
    """Mode-mu matrix application: U_mu <- M U_mu"""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[1] != t.shape[mode]:
        raise ShapeMismatchError(
            f"Matrix with {matrix.shape[-1]} columns cannot act on mode {mode} of size {t.shape[mode]}"
        )
    return map_leaf(t, mode, lambda frame: matrix @ frame)


def contract_mode(t: HTTensor, mode: int, weights: Sequence[complex]) -> HTTensor:
    """Weighted row sum of mode's frame; the mode keeps size 1"""
    weights = np.asarray(weights)
    if weights.ndim != 1 or weights.shape[0] != t.shape[mode]:
        raise ShapeMismatchError(f"Weights of length {weights.shape} for mode {mode} of size {t.shape[mode]}")
    return leaf_transform(t, mode, weights[None, :])


def ht_contract_all(t: HTTensor, weights: Sequence[Sequence[complex]]) -> complex:
    """Full contraction sum_i t[i] * prod_mu w_mu[i_mu]"""
    if len(weights) != t.d:
        raise ShapeMismatchError(f"Need {t.d} weight vectors, got {len(weights)}")
    vectors: Dict[int, np.ndarray] = {}
    for node_id in t.tree.postorder():
        node = t.tree.nodes[node_id]
        if node.is_leaf:
            w = np.asarray(weights[node.modes[0]])
            if w.shape != (t.shape[node.modes[0]],):
                raise ShapeMismatchError(f"Weights for mode {node.modes[0]} have shape {w.shape}")
            vectors[node_id] = w @ t.frames[node_id]
        else:
            vectors[node_id] = np.einsum(
                "a,b,abc->c", vectors.pop(node.left), vectors.pop(node.right), t.transfer_tensor(node_id)
            )
    return complex(vectors[t.tree.root][0])


def ht_inner(a: HTTensor, b: HTTensor) -> complex:
    """Inner product sum conj(a) * b"""
    require_same_structure(a, b)
    grams: Dict[int, np.ndarray] = {}
    for node_id in a.tree.postorder():
        node = a.tree.nodes[node_id]
        if node.is_leaf:
            grams[node_id] = a.frames[node_id].conj().T @ b.frames[node_id]
        else:
            gl, gr = grams.pop(node.left), grams.pop(node.right)
            grams[node_id] = np.einsum(
                "abc,ax,by,xyz->cz", a.transfer_tensor(node_id).conj(), gl, gr, b.transfer_tensor(node_id)
            )
    return complex(grams[a.tree.root][0, 0])


def ht_join(left: HTTensor, right: HTTensor, root_transfer: Union[complex, np.ndarray]) -> HTTensor:
    """Place two rank-1-rooted HTDs under a new root with the given 1 x 1 transfer"""
    tree = DimensionTree(join_nested(left.tree.to_nested(), right.tree.to_nested(), left.d))
    offset = 1 + len(left.tree)
    arrays = {0: np.asarray(root_transfer, dtype=DTYPE).reshape(1, 1)}
    for node_id in range(len(left.tree)):
        arrays[node_id + 1] = _node_array(left, node_id)
    for node_id in range(len(right.tree)):
        arrays[node_id + offset] = _node_array(right, node_id)
    return from_node_arrays(tree, left.shape + right.shape, arrays)


def _node_array(t: HTTensor, node_id: int) -> np.ndarray:
    return t.frames[node_id] if t.tree.nodes[node_id].is_leaf else t.transfers[node_id]


def squeeze(t: HTTensor, modes: Iterable[int]) -> HTTensor:
    """Remove size-1 modes, absorbing their frames into the surviving structure"""
    squeezed = sorted(set(int(m) for m in modes))
    if not squeezed:
        return t
    for mode in squeezed:
        if not 0 <= mode < t.d or t.shape[mode] != 1:
            raise ShapeMismatchError(f"Mode {mode} cannot be squeezed (size must be 1)")
    if len(squeezed) == t.d:
        raise ShapeMismatchError("Cannot squeeze every mode of a tensor")

    def visit(node_id):
        # returns ("vec", row) for a fully squeezed subtree, otherwise a part
        node = t.tree.nodes[node_id]
        if node.is_leaf:
            mode = node.modes[0]
            if mode in squeezed:
                return ("vec", t.frames[node_id][0, :])
            return ("leaf", mode, np.asarray(t.frames[node_id]))
        left, right = visit(node.left), visit(node.right)
        b3 = t.transfer_tensor(node_id)
        if left[0] == "vec" and right[0] == "vec":
            return ("vec", np.einsum("a,b,abc->c", left[1], right[1], b3))
        if left[0] == "vec":
            return _absorb(right, np.einsum("a,abc->bc", left[1], b3))
        if right[0] == "vec":
            return _absorb(left, np.einsum("b,abc->ac", right[1], b3))
        return ("node", left, right, np.asarray(t.transfers[node_id]))

    part = visit(t.tree.root)
    kept = [m for m in range(t.d) if m not in squeezed]
    renumber = {old: new for new, old in enumerate(kept)}

    arrays = {}

    def emit(p):
        node_id = len(arrays)
        if p[0] == "leaf":
            arrays[node_id] = p[2]
            return renumber[p[1]]
        arrays[node_id] = p[3]
        left = emit(p[1])
        right = emit(p[2])
        return (left, right)

    nested = emit(part)
    tree = DimensionTree(nested)
    shape = tuple(t.shape[m] for m in kept)
    return from_node_arrays(tree, shape, arrays)


def _absorb(part, matrix: np.ndarray):
    """Right-multiply the top array of part by matrix"""
    if part[0] == "leaf":
        return ("leaf", part[1], part[2] @ matrix)
    return ("node", part[1], part[2], part[3] @ matrix)
