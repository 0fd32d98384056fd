"""
HWF1 field files.

Layout (little-endian, byte offsets in order):
  bytes 0-3   magic ``HWF1``
  u32         dim
  dim * u32   points per axis
  dim * f64   box length per axis
  N^d * 2*f64 interleaved (re, im) samples, row-major over the axes

The exact byte layout is normative; write followed by read is an
identity, bit for bit.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import FieldFormatError
from .grid import Field, Grid

__all__ = ["read_field", "write_field", "export_trajectory", "MAGIC"]

MAGIC = b"HWF1"


def write_field(field: Field, path) -> None:
    g = field.grid
    header = MAGIC + struct.pack("<I", g.dim)
    header += struct.pack(f"<{g.dim}I", *([g.n_per_axis] * g.dim))
    header += struct.pack(f"<{g.dim}d", *([g.box_length] * g.dim))
    payload = np.ascontiguousarray(field.values, dtype="<c16").tobytes()
    Path(path).write_bytes(header + payload)


def read_field(path) -> Field:
    raw = Path(path).read_bytes()
    if len(raw) < 4 or raw[:4] != MAGIC:
        raise FieldFormatError(f"{path}: bad magic {raw[:4]!r}, expected {MAGIC!r}")
    off = 4
    try:
        (dim,) = struct.unpack_from("<I", raw, off)
        off += 4
        ns = struct.unpack_from(f"<{dim}I", raw, off)
        off += 4 * dim
        ls = struct.unpack_from(f"<{dim}d", raw, off)
        off += 8 * dim
    except struct.error as exc:
        raise FieldFormatError(f"{path}: truncated header ({len(raw)} bytes)") from exc
    if len(set(ns)) != 1 or len(set(ls)) != 1:
        raise FieldFormatError(
            f"{path}: non-cubic grid (n={ns}, L={ls}) is not supported"
        )
    size = ns[0] ** dim
    expected = off + 16 * size
    if len(raw) != expected:
        raise FieldFormatError(
            f"{path}: payload size mismatch, expected {expected} bytes, got {len(raw)}"
        )
    values = np.frombuffer(raw, dtype="<c16", offset=off, count=size)
    grid = Grid(dim, ns[0], ls[0])
    return Field(grid, values.reshape(grid.shape))


def export_trajectory(times, fields, out_dir, prefix: str = "field") -> Path:
    """Dump a time series as HWF1 files plus a JSON manifest; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, (t, f) in enumerate(zip(times, fields)):
        name = f"{prefix}_{i:05d}.hwf1"
        write_field(f, out / name)
        entries.append({"index": i, "time": float(t), "file": name})
    manifest = out / f"{prefix}_manifest.json"
    manifest.write_text(json.dumps({"format": "HWF1", "samples": entries}, indent=2))
    return manifest
