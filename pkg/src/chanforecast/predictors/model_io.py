"""Model checkpoints: a JSON header record followed by a parameter blob.

Layout::

    b"CFMD" | u32 header length | utf-8 JSON {"kind", "config", "dtype"} | CFNN blob
"""

from __future__ import annotations

import io
import json
import struct
from pathlib import Path

import numpy as np

from ..nn.checkpoint import read_params, write_params
from ..nn.params import ParamStore
from .lpcnet import NEURAL_KINDS, LpcnetConfig, config_for_kind, param_specs

MAGIC = b"CFMD"


def model_bytes(kind: str, cfg: LpcnetConfig, params: ParamStore) -> bytes:
    header = json.dumps({"kind": kind, "config": cfg.to_dict(), "dtype": params.dtype.name},
                        sort_keys=True).encode("utf-8")
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack("<I", len(header)))
    buf.write(header)
    write_params(params, buf)
    return buf.getvalue()


def save_model(path: str | Path, kind: str, cfg: LpcnetConfig, params: ParamStore) -> None:
    Path(path).write_bytes(model_bytes(kind, cfg, params))


def load_model(path: str | Path) -> tuple[str, LpcnetConfig, ParamStore]:
    """Read a checkpoint and check its parameters against the echoed config."""
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise ValueError(f"{path}: not a model checkpoint")
    (n,) = struct.unpack_from("<I", data, 4)
    header = json.loads(data[8:8 + n].decode("utf-8"))
    kind = header["kind"]
    if kind not in NEURAL_KINDS:
        raise ValueError(f"{path}: unknown model kind {kind!r}")
    cfg = LpcnetConfig.from_dict(header["config"])
    params = read_params(io.BytesIO(data[8 + n:]))
    expected = {s.name: s.shape for s in param_specs(config_for_kind(kind, cfg))}
    got = {name: v.shape for name, v in params.items()}
    if expected != got:
        raise ValueError(f"{path}: parameters do not match the stored configuration")
    dtype = np.dtype(header.get("dtype", "float64"))
    return kind, cfg, params.astype(dtype)
