"""Hierarchical Tucker tensor container, construction and entry evaluation"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ...config.settings import settings
from ..errors import DenseSizeError, ShapeMismatchError
from .dimension_tree import DimensionTree
from .indexing import check_bounds

logger = logging.getLogger(__name__)

DTYPE = np.complex128


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=DTYPE, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class HTTensor:
    """Hierarchical Tucker decomposition over a dimension tree.

    frames maps leaf node ids to N_mu x r matrices, transfers maps interior node
    ids to (r_l * r_r) x r matrices whose row index is a + r_l * b (left child
    fastest), so that U_alpha = (U_right kron U_left) B_alpha. The root rank is 1.
    """
    tree: DimensionTree
    shape: Tuple[int, ...]
    frames: Dict[int, np.ndarray]
    transfers: Dict[int, np.ndarray]

    def __post_init__(self):
        shape = tuple(int(n) for n in self.shape)
        object.__setattr__(self, "shape", shape)
        if len(shape) != self.tree.d:
            raise ShapeMismatchError(f"Shape {shape} does not match a {self.tree.d}-mode tree")

        frames = {int(k): _frozen(v) for k, v in self.frames.items()}
        transfers = {int(k): _frozen(v) for k, v in self.transfers.items()}
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "transfers", transfers)

        for node_id, node in enumerate(self.tree.nodes):
            if node.is_leaf:
                frame = frames.get(node_id)
                if frame is None or frame.ndim != 2 or frame.shape[0] != shape[node.modes[0]]:
                    raise ShapeMismatchError(f"Leaf {node_id} needs a {shape[node.modes[0]]} x r frame")
            else:
                b = transfers.get(node_id)
                if b is None or b.ndim != 2:
                    raise ShapeMismatchError(f"Interior node {node_id} needs a transfer matrix")
                expected = self.rank(node.left) * self.rank(node.right)
                if b.shape[0] != expected:
                    raise ShapeMismatchError(
                        f"Transfer at node {node_id} has {b.shape[0]} rows, children ranks give {expected}"
                    )
        if self.rank(self.tree.root) != 1:
            raise ShapeMismatchError(f"Root rank must be 1, got {self.rank(self.tree.root)}")

    # --- structure --------------------------------------------------------

    @property
    def d(self) -> int:
        return self.tree.d

    def rank(self, node_id: int) -> int:
        if self.tree.nodes[node_id].is_leaf:
            return self.frames[node_id].shape[1]
        return self.transfers[node_id].shape[1]

    def ranks(self) -> Dict[int, int]:
        return {i: self.rank(i) for i in range(len(self.tree))}

    def max_rank(self) -> int:
        return max(self.rank(i) for i in range(1, len(self.tree))) if len(self.tree) > 1 else 1

    def max_interior_rank(self) -> int:
        interior = [self.rank(i) for i in self.tree.interior() if i != self.tree.root]
        return max(interior) if interior else 1

    def transfer_tensor(self, node_id: int) -> np.ndarray:
        """Transfer matrix of node_id reshaped to r_l x r_r x r"""
        node = self.tree.nodes[node_id]
        b = self.transfers[node_id]
        return b.reshape(self.rank(node.left), self.rank(node.right), b.shape[1], order="F")

    def storage_count(self) -> int:
        """Number of stored scalars across frames and transfers"""
        return int(sum(f.size for f in self.frames.values()) + sum(b.size for b in self.transfers.values()))

    def compression_ratio(self) -> float:
        return self.storage_count() / float(np.prod(self.shape, dtype=np.float64))

    def __repr__(self) -> str:
        return f"HTTensor(shape={self.shape}, tree={self.tree.to_nested()}, max_rank={self.max_rank()})"


# --- construction ---------------------------------------------------------

def from_node_arrays(tree: DimensionTree, shape: Sequence[int],
                     arrays: Dict[int, np.ndarray]) -> HTTensor:
    """Split a node-id -> array dict into frames and transfers"""
    frames = {i: a for i, a in arrays.items() if tree.nodes[i].is_leaf}
    transfers = {i: a for i, a in arrays.items() if not tree.nodes[i].is_leaf}
    return HTTensor(tree, tuple(shape), frames, transfers)


def ht_rank_one(tree: DimensionTree, factors: Sequence[np.ndarray], scale: complex = 1.0) -> HTTensor:
    """Separable tensor scale * factors[0] x factors[1] x ... as a rank-1 HTD"""
    if len(factors) != tree.d:
        raise ShapeMismatchError(f"Need {tree.d} factors, got {len(factors)}")
    arrays = {}
    for node_id, node in enumerate(tree.nodes):
        if node.is_leaf:
            arrays[node_id] = np.asarray(factors[node.modes[0]], dtype=DTYPE).reshape(-1, 1)
        else:
            arrays[node_id] = np.ones((1, 1), dtype=DTYPE)
    root = tree.root
    arrays[root] = arrays[root] * scale
    return from_node_arrays(tree, [len(f) for f in factors], arrays)


def ht_zeros(tree: DimensionTree, shape: Sequence[int]) -> HTTensor:
    """The zero tensor with all ranks 1"""
    return ht_rank_one(tree, [np.zeros(n) for n in shape])


def ht_constant(tree: DimensionTree, shape: Sequence[int], value: complex) -> HTTensor:
    return ht_rank_one(tree, [np.ones(n) for n in shape], scale=value)


def ht_random(tree: DimensionTree, shape: Sequence[int], rank: int,
              rng: np.random.Generator, complex_valued: bool = False) -> HTTensor:
    """Random HTD with every non-root rank equal to min(rank, attainable)"""

    def draw(*dims):
        if complex_valued:
            return rng.standard_normal(dims) + 1j * rng.standard_normal(dims)
        return rng.standard_normal(dims)

    ranks = {}
    for node_id in tree.postorder():
        node = tree.nodes[node_id]
        if node_id == tree.root:
            ranks[node_id] = 1
        elif node.is_leaf:
            ranks[node_id] = min(rank, shape[node.modes[0]])
        else:
            ranks[node_id] = min(rank, ranks[node.left] * ranks[node.right])

    arrays = {}
    for node_id, node in enumerate(tree.nodes):
        if node.is_leaf:
            arrays[node_id] = draw(shape[node.modes[0]], ranks[node_id])
        else:
            arrays[node_id] = draw(ranks[node.left] * ranks[node.right], ranks[node_id])
    return from_node_arrays(tree, shape, arrays)


def ht_from_dense(array: np.ndarray, tree: DimensionTree, max_entries: Optional[int] = None) -> HTTensor:
    """Exact full-rank HTD of a dense array (identity frames, dense root)"""
    array = np.asarray(array)
    _check_dense_cap(array.shape, max_entries)
    if array.ndim != tree.d:
        raise ShapeMismatchError(f"Array has {array.ndim} modes, tree has {tree.d}")

    if tree.d == 1:
        return from_node_arrays(tree, array.shape, {0: array.reshape(-1, 1)})

    arrays = {}
    for node_id, node in enumerate(tree.nodes):
        size = int(np.prod([array.shape[m] for m in node.modes]))
        if node_id == tree.root:
            arrays[node_id] = array.reshape(-1, 1, order="F")
        else:
            arrays[node_id] = np.eye(size, dtype=DTYPE)
    return from_node_arrays(tree, array.shape, arrays)


# --- evaluation -----------------------------------------------------------

def ht_entries(t: HTTensor, indices: np.ndarray) -> np.ndarray:
    """Evaluate many entries at once; indices is an (M, d) integer array"""
    indices = check_bounds(t.shape, indices)
    vectors: Dict[int, np.ndarray] = {}
    for node_id in t.tree.postorder():
        node = t.tree.nodes[node_id]
        if node.is_leaf:
            vectors[node_id] = t.frames[node_id][indices[:, node.modes[0]], :]
        else:
            left = vectors.pop(node.left)
            right = vectors.pop(node.right)
            b3 = t.transfer_tensor(node_id)
            partial = np.einsum("ma,abc->mbc", left, b3)
            vectors[node_id] = np.einsum("mbc,mb->mc", partial, right)
    return vectors[t.tree.root][:, 0]


def ht_entry(t: HTTensor, index: Sequence[int]) -> complex:
    """Single entry at a 0-based multi-index"""
    return complex(ht_entries(t, np.asarray(index, dtype=np.int64)[None, :])[0])


def node_frames(t: HTTensor, max_entries: Optional[int] = None) -> Dict[int, np.ndarray]:
    """Explicit frames U_alpha for every node, built bottom-up"""
    _check_dense_cap(t.shape, max_entries)
    frames: Dict[int, np.ndarray] = {}
    for node_id in t.tree.postorder():
        node = t.tree.nodes[node_id]
        if node.is_leaf:
            frames[node_id] = np.asarray(t.frames[node_id])
        else:
            ul, ur = frames[node.left], frames[node.right]
            b3 = t.transfer_tensor(node_id)
            block = np.einsum("ia,jb,abc->ijc", ul, ur, b3)
            frames[node_id] = block.reshape(ul.shape[0] * ur.shape[0], b3.shape[2], order="F")
    return frames


def ht_full(t: HTTensor, max_entries: Optional[int] = None) -> np.ndarray:
    """Dense array of t; test oracle only"""
    root_frame = node_frames(t, max_entries)[t.tree.root]
    return root_frame[:, 0].reshape(t.shape, order="F")


def _check_dense_cap(shape: Sequence[int], max_entries: Optional[int]):
    cap = max_entries if max_entries is not None else settings.get("ht_core.dense_cap", 10_000_000)
    total = int(np.prod(shape, dtype=np.float64))
    if total > cap:
        raise DenseSizeError(f"Dense size {total} exceeds cap {cap}")


def same_structure(a: HTTensor, b: HTTensor) -> bool:
    return a.tree == b.tree and a.shape == b.shape


def require_same_structure(a: HTTensor, b: HTTensor):
    if not same_structure(a, b):
        raise ShapeMismatchError(
            f"Tree/shape mismatch: {a.tree.to_nested()} {a.shape} vs {b.tree.to_nested()} {b.shape}"
        )
