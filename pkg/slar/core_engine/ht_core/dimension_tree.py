"""Dimension trees - binary trees of contiguous mode ranges"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple, Union

from ..errors import ConfigurationError

logger = logging.getLogger(__name__)

# A nested layout is either a mode number (leaf) or a (left, right) pair
Nested = Union[int, Tuple["Nested", "Nested"]]


class TreeStrategy(str, Enum):
    balanced = "balanced"
    paired_unbalanced = "paired-unbalanced"


@dataclass(frozen=True)
class TreeNode:
    """One node of a dimension tree"""
    modes: Tuple[int, ...]
    parent: Optional[int]
    left: Optional[int]
    right: Optional[int]
    depth: int

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    @property
    def order(self) -> int:
        return len(self.modes)


class DimensionTree:
    """Binary tree over modes 0..d-1.

    Nodes are numbered in preorder, so the root is node 0. Every left child holds
    modes strictly smaller than its right sibling, which makes every node a
    contiguous range of modes.
    """

    def __init__(self, nested: Nested):
        self.nodes: List[TreeNode] = []
        self._leaf_of_mode = {}
        self._build(nested, parent=None, depth=0)
        self.d = len(self.nodes[0].modes)
        if sorted(self._leaf_of_mode) != list(range(self.d)):
            raise ConfigurationError(f"Tree leaves must cover modes 0..{self.d - 1} exactly once")
        for node in self.nodes:
            if not node.is_leaf:
                left, right = self.nodes[node.left], self.nodes[node.right]
                if left.modes[-1] >= right.modes[0]:
                    raise ConfigurationError("Left child modes must precede right child modes")
        self._nested = self._to_nested(0)

    def _build(self, nested: Nested, parent: Optional[int], depth: int) -> int:
        node_id = len(self.nodes)
        if isinstance(nested, int):
            if nested in self._leaf_of_mode:
                raise ConfigurationError(f"Mode {nested} appears twice in tree layout")
            self.nodes.append(TreeNode((nested,), parent, None, None, depth))
            self._leaf_of_mode[nested] = node_id
            return node_id

        if len(nested) != 2:
            raise ConfigurationError(f"Tree nodes must have exactly two children: {nested}")
        self.nodes.append(None)  # placeholder, replaced once children are known
        left = self._build(nested[0], node_id, depth + 1)
        right = self._build(nested[1], node_id, depth + 1)
        modes = self.nodes[left].modes + self.nodes[right].modes
        self.nodes[node_id] = TreeNode(modes, parent, left, right, depth)
        return node_id

    # --- construction -----------------------------------------------------

    @classmethod
    def build(cls, d: int, strategy: Union[str, TreeStrategy] = TreeStrategy.balanced) -> "DimensionTree":
        """Build a tree over d modes with the given strategy"""
        if d < 1:
            raise ConfigurationError(f"A dimension tree needs at least one mode, got d={d}")
        try:
            strategy = TreeStrategy(strategy)
        except ValueError:
            raise ConfigurationError(f"Unknown tree strategy: {strategy}")

        if strategy == TreeStrategy.balanced:
            return cls(_balanced(list(range(d))))

        if d % 2 != 0:
            raise ConfigurationError(f"paired-unbalanced trees need an even mode count, got d={d}")
        pairs = [(2 * p, 2 * p + 1) for p in range(d // 2)]
        return cls(_paired(pairs))

    @classmethod
    def from_nested(cls, nested: Nested) -> "DimensionTree":
        return cls(nested)

    # --- queries ----------------------------------------------------------

    @property
    def root(self) -> int:
        return 0

    def to_nested(self) -> Nested:
        return self._nested

    def _to_nested(self, node_id: int) -> Nested:
        node = self.nodes[node_id]
        if node.is_leaf:
            return node.modes[0]
        return (self._to_nested(node.left), self._to_nested(node.right))

    def leaf_of(self, mode: int) -> int:
        return self._leaf_of_mode[mode]

    def leaves(self) -> List[int]:
        return [i for i, n in enumerate(self.nodes) if n.is_leaf]

    def interior(self) -> List[int]:
        return [i for i, n in enumerate(self.nodes) if not n.is_leaf]

    def postorder(self) -> List[int]:
        """Node ids ordered children before parents"""
        order = []

        def visit(node_id: int):
            node = self.nodes[node_id]
            if not node.is_leaf:
                visit(node.left)
                visit(node.right)
            order.append(node_id)

        visit(0)
        return order

    def height(self, node_id: int = 0) -> int:
        """Longest edge count from node_id down to a leaf"""
        node = self.nodes[node_id]
        if node.is_leaf:
            return 0
        return 1 + max(self.height(node.left), self.height(node.right))

    @property
    def depth(self) -> int:
        """Maximum leaf depth of the tree"""
        return max(n.depth for n in self.nodes)

    def subtree(self, node_id: int) -> "DimensionTree":
        """The subtree rooted at node_id with its modes renumbered from 0"""
        offset = self.nodes[node_id].modes[0]
        return DimensionTree(_shift(self._to_nested(node_id), -offset))

    def __len__(self) -> int:
        return len(self.nodes)

    def __eq__(self, other) -> bool:
        return isinstance(other, DimensionTree) and self._nested == other._nested

    def __hash__(self) -> int:
        return hash(self._nested)

    def __repr__(self) -> str:
        return f"DimensionTree({self._nested})"


def _balanced(modes: List[int]) -> Nested:
    if len(modes) == 1:
        return modes[0]
    half = (len(modes) + 1) // 2
    return (_balanced(modes[:half]), _balanced(modes[half:]))


def _paired(pairs: List[Tuple[int, int]]) -> Nested:
    if len(pairs) == 1:
        return pairs[0]
    half = (len(pairs) + 1) // 2
    return (_paired(pairs[:half]), _paired(pairs[half:]))


def _shift(nested: Nested, offset: int) -> Nested:
    if isinstance(nested, int):
        return nested + offset
    return (_shift(nested[0], offset), _shift(nested[1], offset))


def join_nested(left: Nested, right: Nested, left_modes: int) -> Nested:
    """Combine two renumbered layouts under a new root"""
    return (left, _shift(right, left_modes))
