"""Self-describing binary container for HT tensors.

Layout: 8-byte magic, little-endian uint64 header length, UTF-8 JSON header,
then the raw little-endian complex128 payload of every node array in node order.
"""

import json
import logging
import struct
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from ..errors import ShapeMismatchError, SlarError
from .dimension_tree import DimensionTree
from .ht_tensor import HTTensor, from_node_arrays

logger = logging.getLogger(__name__)

MAGIC = b"SLARHT1\n"
FORMAT_VERSION = 1
_PAYLOAD_DTYPE = np.dtype("<c16")


def _to_json_nested(nested):
    return nested if isinstance(nested, int) else [_to_json_nested(nested[0]), _to_json_nested(nested[1])]


def _from_json_nested(nested):
    return nested if isinstance(nested, int) else (_from_json_nested(nested[0]), _from_json_nested(nested[1]))


def dumps(t: HTTensor, metadata: Optional[Dict[str, Any]] = None) -> bytes:
    """Serialize t (plus optional JSON metadata) to bytes"""
    arrays = []
    manifest = []
    offset = 0
    for node_id, node in enumerate(t.tree.nodes):
        array = t.frames[node_id] if node.is_leaf else t.transfers[node_id]
        raw = np.ascontiguousarray(array, dtype=_PAYLOAD_DTYPE).tobytes(order="C")
        manifest.append({"node": node_id, "rows": array.shape[0], "cols": array.shape[1],
                         "offset": offset, "nbytes": len(raw)})
        arrays.append(raw)
        offset += len(raw)

    header = {
        "format_version": FORMAT_VERSION,
        "dtype": "complex128-le",
        "tree": _to_json_nested(t.tree.to_nested()),
        "shape": list(t.shape),
        "ranks": [t.rank(i) for i in range(len(t.tree))],
        "arrays": manifest,
        "metadata": metadata or {},
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    return MAGIC + struct.pack("<Q", len(header_bytes)) + header_bytes + b"".join(arrays)


def loads(blob: bytes) -> Tuple[HTTensor, Dict[str, Any]]:
    """Inverse of dumps; returns the tensor and its metadata"""
    if blob[:len(MAGIC)] != MAGIC:
        raise SlarError("Not an HT container (bad magic bytes)")
    start = len(MAGIC)
    (header_len,) = struct.unpack("<Q", blob[start:start + 8])
    header = json.loads(blob[start + 8:start + 8 + header_len].decode("utf-8"))
    if header.get("format_version") != FORMAT_VERSION:
        raise SlarError(f"Unsupported HT container version {header.get('format_version')}")

    payload = memoryview(blob)[start + 8 + header_len:]
    tree = DimensionTree(_from_json_nested(header["tree"]))
    arrays = {}
    for entry in header["arrays"]:
        chunk = payload[entry["offset"]:entry["offset"] + entry["nbytes"]]
        if len(chunk) != entry["nbytes"]:
            raise SlarError(f"Truncated payload for node {entry['node']}")
        values = np.frombuffer(chunk, dtype=_PAYLOAD_DTYPE).reshape(entry["rows"], entry["cols"])
        arrays[entry["node"]] = values

    t = from_node_arrays(tree, header["shape"], arrays)
    if [t.rank(i) for i in range(len(tree))] != header["ranks"]:
        raise ShapeMismatchError("Rank list in header does not match payload")
    return t, header.get("metadata", {})


def save_ht(t: HTTensor, path: Union[str, Path], metadata: Optional[Dict[str, Any]] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(dumps(t, metadata))
    tmp.replace(path)
    logger.debug(f"Saved HT tensor {t.shape} to {path}")
    return path


def load_ht(path: Union[str, Path]) -> Tuple[HTTensor, Dict[str, Any]]:
    return loads(Path(path).read_bytes())
