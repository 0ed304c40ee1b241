"""Flat binary checkpoint container.

Layout: 8-byte magic, little-endian uint32 header length, UTF-8 JSON
header (metadata plus the ordered entry names and shapes), then the
float64 little-endian payloads concatenated in entry order.
"""

from __future__ import annotations

import json
import struct

import numpy as np

MAGIC = b"LLCKPT01"


def save_container(path: str, meta: dict, arrays: list[tuple[str, np.ndarray]]) -> None:
    header = {
        "meta": meta,
        "entries": [{"name": name, "shape": list(arr.shape)} for name, arr in arrays],
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for _, arr in arrays:
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_container(path: str) -> tuple[dict, dict[str, np.ndarray]]:
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise ValueError(f"{path} is not a checkpoint file")
        (length,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(length).decode("utf-8"))
        arrays: dict[str, np.ndarray] = {}
        for entry in header["entries"]:
            shape = tuple(entry["shape"])
            count = int(np.prod(shape)) if shape else 1
            buf = fh.read(8 * count)
            if len(buf) != 8 * count:
                raise ValueError(f"truncated payload for entry {entry['name']}")
            arrays[entry["name"]] = np.frombuffer(buf, dtype="<f8").astype(np.float64).reshape(shape)
        trailing = fh.read(1)
        if trailing:
            raise ValueError("unexpected trailing bytes in checkpoint")
    return header["meta"], arrays
