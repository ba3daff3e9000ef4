"""
Unit tests for the binary HT container
"""

import numpy as np
import pytest

from slar.core_engine.errors import SlarError
from slar.core_engine.ht_core.ht_tensor import ht_random
from slar.core_engine.ht_core.serialization import MAGIC, dumps, load_ht, loads, save_ht


@pytest.mark.unit
class TestSerialization:

    def test_round_trip_is_exact(self, tree4, rng):
        t = ht_random(tree4, (3, 4, 5, 6), 2, rng, complex_valued=True)
        restored, metadata = loads(dumps(t, {'step': 3, 'time': 0.1 + 0.2}))
        assert restored.tree == t.tree
        assert restored.shape == t.shape
        for node_id, frame in t.frames.items():
            np.testing.assert_array_equal(restored.frames[node_id], frame)
        for node_id, transfer in t.transfers.items():
            np.testing.assert_array_equal(restored.transfers[node_id], transfer)
        assert metadata == {'step': 3, 'time': 0.1 + 0.2}

    def test_header_layout(self, random_ht4):
        blob = dumps(random_ht4)
        assert blob.startswith(MAGIC)

    def test_bad_magic(self, random_ht4):
        with pytest.raises(SlarError):
            loads(b"NOTANHT!" + dumps(random_ht4)[8:])

    def test_truncated_payload(self, random_ht4):
        with pytest.raises(SlarError):
            loads(dumps(random_ht4)[:-8])

    def test_file_round_trip(self, random_ht4, tmp_path):
        path = save_ht(random_ht4, tmp_path / "nested" / "f.ht", {'note': 'x'})
        assert path.exists()
        assert not path.with_suffix(".ht.tmp").exists()
        restored, metadata = load_ht(path)
        assert restored.ranks() == random_ht4.ranks()
        assert metadata['note'] == 'x'
