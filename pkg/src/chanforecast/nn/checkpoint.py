"""Binary parameter checkpoints.

Layout (little endian)::

    b"CFNN" | u32 version | u32 entry count
    per entry: u32 name length | utf-8 name | u8 rank | u32 dims[rank] | f64 payload
"""

from __future__ import annotations

import io
import struct
from pathlib import Path
from typing import BinaryIO

import numpy as np

from .params import ParamStore

MAGIC = b"CFNN"
VERSION = 1


def write_params(params: ParamStore, fh: BinaryIO) -> None:
    fh.write(MAGIC)
    fh.write(struct.pack("<II", VERSION, len(params)))
    for name, value in params.items():
        raw = name.encode("utf-8")
        fh.write(struct.pack("<I", len(raw)))
        fh.write(raw)
        fh.write(struct.pack("<B", value.ndim))
        fh.write(struct.pack(f"<{value.ndim}I", *value.shape))
        fh.write(np.ascontiguousarray(value, dtype="<f8").tobytes())


def read_params(fh: BinaryIO) -> ParamStore:
    if fh.read(4) != MAGIC:
        raise ValueError("not a CFNN checkpoint")
    version, count = struct.unpack("<II", _read_exact(fh, 8))
    if version != VERSION:
        raise ValueError(f"unsupported checkpoint version {version}")
    arrays = []
    for _ in range(count):
        (n,) = struct.unpack("<I", _read_exact(fh, 4))
        name = _read_exact(fh, n).decode("utf-8")
        (rank,) = struct.unpack("<B", _read_exact(fh, 1))
        dims = struct.unpack(f"<{rank}I", _read_exact(fh, 4 * rank))
        size = int(np.prod(dims, dtype=np.int64)) if rank else 1
        data = np.frombuffer(_read_exact(fh, 8 * size), dtype="<f8").reshape(dims)
        arrays.append((name, data.astype(np.float64)))
    return ParamStore(arrays)


def save_params(params: ParamStore, path: str | Path) -> None:
    buf = io.BytesIO()
    write_params(params, buf)
    Path(path).write_bytes(buf.getvalue())


def load_params(path: str | Path) -> ParamStore:
    with open(path, "rb") as fh:
        return read_params(fh)


def _read_exact(fh: BinaryIO, n: int) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise ValueError("truncated checkpoint")
    return data
