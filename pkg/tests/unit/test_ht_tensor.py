"""
Unit tests for HT tensor construction, evaluation and dense reconstruction
"""

import numpy as np
import pytest

from slar.core_engine.errors import DenseSizeError, ShapeMismatchError
from slar.core_engine.ht_core.dimension_tree import DimensionTree
from slar.core_engine.ht_core.ht_tensor import (
    HTTensor, from_node_arrays, ht_constant, ht_entries, ht_entry, ht_from_dense, ht_full,
    ht_random, ht_rank_one, ht_zeros, node_frames,
)


@pytest.mark.unit
class TestConstruction:
    """Validation and the basic constructors"""

    def test_rank_one_matches_outer_product(self, rng):
        tree = DimensionTree.build(3)
        factors = [rng.standard_normal(n) for n in (3, 4, 5)]
        t = ht_rank_one(tree, factors, scale=2.0)
        expected = 2.0 * np.einsum("i,j,k->ijk", *factors)
        np.testing.assert_allclose(ht_full(t), expected, rtol=1e-13)
        assert all(rank == 1 for rank in t.ranks().values())

    def test_outer_product_is_kronecker(self, rng):
        u, v = rng.standard_normal(6), rng.standard_normal(5)
        t = ht_rank_one(DimensionTree.build(2), [v, u])
        # vec(v u^T) with the first mode fastest equals kron(u, v)
        np.testing.assert_allclose(ht_full(t).reshape(-1, order="F"), np.kron(u, v), rtol=1e-14)

    def test_random_ranks(self, tree4, rng):
        t = ht_random(tree4, (5, 5, 5, 5), 3, rng)
        ranks = t.ranks()
        assert ranks[tree4.root] == 1
        assert all(ranks[i] == 3 for i in range(1, len(tree4)))

    def test_storage_count_formula(self, tree4, rng):
        n, r, d = 8, 3, 4
        t = ht_random(tree4, (n,) * d, r, rng)
        assert t.storage_count() == d * n * r + (d - 2) * r ** 3 + r ** 2
        assert t.compression_ratio() == pytest.approx(t.storage_count() / n ** d)

    def test_root_rank_must_be_one(self):
        tree = DimensionTree.build(2)
        arrays = {0: np.ones((1, 2)), 1: np.ones((3, 1)), 2: np.ones((3, 1))}
        with pytest.raises(ShapeMismatchError):
            from_node_arrays(tree, (3, 3), arrays)

    def test_transfer_rows_must_match_children(self):
        tree = DimensionTree.build(2)
        arrays = {0: np.ones((3, 1)), 1: np.ones((3, 2)), 2: np.ones((3, 2))}
        with pytest.raises(ShapeMismatchError):
            from_node_arrays(tree, (3, 3), arrays)

    def test_arrays_are_read_only(self, random_ht4):
        leaf = random_ht4.tree.leaves()[0]
        with pytest.raises(ValueError):
            random_ht4.frames[leaf][0, 0] = 1.0

    def test_zeros_and_constant(self):
        tree = DimensionTree.build(3)
        np.testing.assert_array_equal(ht_full(ht_zeros(tree, (2, 3, 4))), np.zeros((2, 3, 4)))
        np.testing.assert_allclose(ht_full(ht_constant(tree, (2, 3, 4), 1.5)), np.full((2, 3, 4), 1.5))


@pytest.mark.unit
class TestEvaluation:
    """Entry access against the dense oracle"""

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_entries_match_dense(self, d, rng):
        tree = DimensionTree.build(d)
        shape = tuple(rng.integers(3, 9, d))
        t = ht_random(tree, shape, 3, rng, complex_valued=True)
        dense = ht_full(t)
        indices = np.column_stack([rng.integers(0, n, 100) for n in shape])
        values = ht_entries(t, indices)
        expected = dense[tuple(indices.T)]
        assert np.max(np.abs(values - expected)) <= 1e-12 * np.max(np.abs(dense))
        assert ht_entry(t, indices[0]) == pytest.approx(expected[0], rel=1e-12)

    def test_dense_round_trip(self, rng):
        tree = DimensionTree.build(3)
        array = rng.standard_normal((3, 4, 5))
        np.testing.assert_allclose(ht_full(ht_from_dense(array, tree)).real, array, atol=1e-13)

    def test_span_equivalence(self, random_ht4):
        """Every interior matricization lies in the span of its children's frames"""
        dense = ht_full(random_ht4)
        frames = node_frames(random_ht4)
        tree = random_ht4.tree
        for node_id in tree.interior():
            if node_id == tree.root:
                continue
            node = tree.nodes[node_id]
            rows = int(np.prod([random_ht4.shape[m] for m in node.modes]))
            moved = np.moveaxis(dense, list(node.modes), list(range(len(node.modes))))
            matrix = moved.reshape(rows, -1, order="F")
            basis = np.kron(frames[node.right], frames[node.left])
            q, _ = np.linalg.qr(basis)
            residual = matrix - q @ (q.conj().T @ matrix)
            assert np.linalg.norm(residual) <= 1e-10 * np.linalg.norm(matrix)

    def test_dense_cap(self, random_ht4):
        with pytest.raises(DenseSizeError):
            ht_full(random_ht4, max_entries=100)

    def test_single_mode_tensor(self):
        tree = DimensionTree.build(1)
        t = HTTensor(tree, (4,), {0: np.arange(4.0)[:, None]}, {})
        np.testing.assert_allclose(ht_full(t).real, np.arange(4.0))
        assert t.max_rank() == 1
