"""Binary snapshots of fields and matrices, plus CSV export of real parts.

Layout (all little-endian)::

    offset  size  content
    0       8     magic b"SQSNAP\\x00\\x01"  (the last byte is the format version)
    8       1     kind: 0 = PhaseField, 1 = OperatorMatrix
    9       16    role tag, ASCII, NUL padded
    25      4     n (uint32)
    29      8     x_min (float64)
    37      8     x_max (float64)
    45      8     hbar (float64)
    53      ...   n*n complex samples, row-major, each as (re, im) float64
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..io import write_csv
from .grid import GridSpec, OperatorMatrix, PhaseField

__all__ = ["SNAPSHOT_MAGIC", "SnapshotError", "write_snapshot", "read_snapshot", "export_csv"]

SNAPSHOT_VERSION = 1
SNAPSHOT_MAGIC = b"SQSNAP\x00" + bytes([SNAPSHOT_VERSION])
_HEADER = struct.Struct("<8sB16sIddd")


class SnapshotError(ValueError):
    """Malformed or truncated snapshot file."""


def write_snapshot(path, obj) -> Path:
    if isinstance(obj, PhaseField):
        kind, data = 0, obj.values
    elif isinstance(obj, OperatorMatrix):
        kind, data = 1, obj.entries
    else:
        raise TypeError(f"cannot snapshot {type(obj).__name__}")
    g = obj.grid
    header = _HEADER.pack(SNAPSHOT_MAGIC, kind, obj.role.encode("ascii"), g.n, g.x_min, g.x_max, g.hbar)
    path = Path(path)
    path.write_bytes(header + np.ascontiguousarray(data, dtype="<c16").tobytes())
    return path


def read_snapshot(path):
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise SnapshotError("file shorter than the snapshot header")
    magic, kind, role, n, x_min, x_max, hbar = _HEADER.unpack_from(raw)
    if magic != SNAPSHOT_MAGIC:
        raise SnapshotError(f"bad magic {magic!r}")
    body = raw[_HEADER.size:]
    if len(body) != 16 * n * n:
        raise SnapshotError(f"expected {16 * n * n} data bytes, found {len(body)}")
    grid = GridSpec(int(n), x_min, x_max, hbar)
    data = np.frombuffer(body, dtype="<c16").reshape(n, n).astype(complex)
    role = role.rstrip(b"\x00").decode("ascii")
    if kind == 0:
        return PhaseField(grid, data, role)
    if kind == 1:
        return OperatorMatrix(grid, data, role)
    raise SnapshotError(f"unknown snapshot kind {kind}")


def export_csv(path, obj) -> Path:
    """Long-format CSV of real parts: (q, p, value) for fields, (x, y, kernel) for matrices."""
    g = obj.grid
    if isinstance(obj, PhaseField):
        header, axis2, data = ("q", "p", "value"), g.p, obj.values.real
    else:
        header, axis2, data = ("x", "y", "kernel"), g.x, obj.kernel.real
    rows = ((g.x[i], axis2[k], data[i, k]) for i in range(g.n) for k in range(g.n))
    return write_csv(path, header, rows)
