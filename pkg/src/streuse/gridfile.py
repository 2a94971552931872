"""Flat binary grid format plus a JSON sidecar for metadata.

Layout (little-endian): magic "RIPL", version u32, then T, H, W, d as u32,
then a reserved u64 (zero), for a 32-byte header, followed by T*H*W*d
float64 token values in t-major token order. The sidecar ``<path>.json``
records the channel partition and whatever generator parameters produced
the grid; a grid read without a sidecar gets the default partition.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .grid import ChannelPartition, GridShape, TokenGrid, default_partition

MAGIC = b"RIPL"
VERSION = 1
_HEADER = struct.Struct("<4sIIIIIQ")

HEADER_SIZE = _HEADER.size  # 32 bytes


def sidecar_path(path) -> Path:
    return Path(str(path) + ".json")


def write_grid(path, grid: TokenGrid, meta: dict | None = None) -> None:
    """Write the binary grid and its sidecar metadata file."""
    path = Path(path)
    s = grid.shape
    header = _HEADER.pack(MAGIC, VERSION, s.t, s.h, s.w, s.d, 0)
    payload = np.ascontiguousarray(grid.values, dtype="<f8").tobytes()
    path.write_bytes(header + payload)

    doc = {
        "shape": {"t": s.t, "h": s.h, "w": s.w, "d": s.d},
        "partition": {
            "d_t": grid.partition.d_t,
            "d_x": grid.partition.d_x,
            "d_y": grid.partition.d_y,
        },
    }
    if meta:
        doc["generator"] = meta
    sidecar_path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_grid(path) -> TokenGrid:
    """Read a binary grid; the partition comes from the sidecar if present."""
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < HEADER_SIZE:
        raise ValueError(f"{path}: truncated header ({len(raw)} bytes)")
    magic, version, t, h, w, d, _reserved = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    shape = GridShape(t, h, w, d)
    expected = HEADER_SIZE + shape.tokens * d * 8
    if len(raw) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(raw)}")
    values = np.frombuffer(raw, dtype="<f8", offset=HEADER_SIZE).astype(np.float64)
    values = values.reshape(shape.tokens, d)

    partition = default_partition(d)
    side = sidecar_path(path)
    if side.exists():
        doc = json.loads(side.read_text())
        p = doc.get("partition")
        if p:
            partition = ChannelPartition(p["d_t"], p["d_x"], p["d_y"])
    return TokenGrid(shape, partition, values)
