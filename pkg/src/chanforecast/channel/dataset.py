"""Sliding-window datasets over generated trajectories and the CHPD file format.

CHPD layout (little endian)::

    b"CHPD" | u32 version=1 | u32 N_b | u32 T | u32 n_traj | u8 dtype (1=f64, 2=f32)
    n_traj x (u64 speed mm/s, u64 scenario id, u64 seed index)
    samples [trajectory][time][antenna] as (re, im) pairs
    optional trailer: b"SPLT" | u32 n_traj | u8 partition per trajectory (0 train, 1 test)
"""

from __future__ import annotations

import io
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from ..numerics import make_rng
from .config import ScenarioConfig
from .trajectory import generate_trajectory

MAGIC = b"CHPD"
VERSION = 1
SPLIT_MAGIC = b"SPLT"
_DTYPES = {1: np.float64, 2: np.float32}
TRAIN, TEST = 0, 1
# spawn index reserved for the train/test shuffle
_SPLIT_STREAM = 2**32 - 1


def window_count(n_snapshots: int, k: int, horizon: int) -> int:
    return max(0, n_snapshots - k - horizon + 1)


@dataclass
class WindowBatch:
    """Windows stacked along axis 0.

    ``past`` is (n, K, N_b) oldest-first, ``target`` is the snapshot
    ``horizon`` steps after the last past one.
    """

    past: np.ndarray
    target: np.ndarray
    traj_id: np.ndarray
    start: np.ndarray
    horizon: int

    def __len__(self) -> int:
        return self.past.shape[0]

    def subset(self, idx) -> "WindowBatch":
        return WindowBatch(self.past[idx], self.target[idx], self.traj_id[idx], self.start[idx], self.horizon)


@dataclass
class Dataset:
    snapshots: np.ndarray  # (n_traj, T, N_b) complex
    speeds_kmh: np.ndarray
    scenario_ids: np.ndarray
    seed_indices: np.ndarray
    partition: np.ndarray  # TRAIN / TEST per trajectory

    def __post_init__(self):
        # one code per trajectory keeps the train and test sets disjoint
        part = np.asarray(self.partition)
        if part.shape != (self.snapshots.shape[0],):
            raise ValueError("need exactly one partition code per trajectory")
        if not np.all((part == TRAIN) | (part == TEST)):
            raise ValueError("partition codes must be 0 (train) or 1 (test)")

    @property
    def n_traj(self) -> int:
        return self.snapshots.shape[0]

    @property
    def n_snapshots(self) -> int:
        return self.snapshots.shape[1]

    @property
    def n_antennas(self) -> int:
        return self.snapshots.shape[2]

    def trajectory_ids(self, part: str | None = None) -> np.ndarray:
        if part is None or part == "all":
            return np.arange(self.n_traj)
        flag = {"train": TRAIN, "test": TEST}[part]
        return np.flatnonzero(self.partition == flag)

    def windows(self, k: int, horizon: int, part: str | None = None,
                traj_ids: Iterable[int] | None = None) -> WindowBatch:
        """All valid windows of the selected trajectories, in (trajectory, start) order."""
        if k < 2 or horizon < 1:
            raise ValueError("need K >= 2 and horizon >= 1")
        n_win = window_count(self.n_snapshots, k, horizon)
        if n_win == 0:
            raise ValueError(f"trajectories of length {self.n_snapshots} are too short for K={k}, horizon={horizon}")
        ids = self.trajectory_ids(part) if traj_ids is None else np.asarray(list(traj_ids), dtype=int)
        starts = np.arange(n_win)
        tid = np.repeat(ids, n_win)
        st = np.tile(starts, ids.size)
        offs = st[:, None] + np.arange(k)[None, :]
        past = self.snapshots[tid[:, None], offs]
        target = self.snapshots[tid, st + k - 1 + horizon]
        return WindowBatch(past, target, tid, st, horizon)

    def window_total(self, k: int, horizon: int, part: str | None = None) -> int:
        return self.trajectory_ids(part).size * window_count(self.n_snapshots, k, horizon)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("CHANFORECAST_THREADS", "1")))
    except ValueError:
        return 1


def trajectory_speeds(cfg: ScenarioConfig, n_traj: int) -> np.ndarray:
    """Per-trajectory speed (km/h); a range is split at equal intervals."""
    if cfg.speed_range_kmh is None:
        return np.full(n_traj, float(cfg.speed_kmh))
    lo, hi = cfg.speed_range_kmh
    return np.linspace(lo, hi, n_traj)


def split_partition(n_traj: int, split_ratio: float, seed: int) -> np.ndarray:
    if n_traj < 2:
        raise ValueError("need at least two trajectories to split")
    if not 0.0 < split_ratio < 1.0:
        raise ValueError("split_ratio must lie in (0, 1)")
    n_train = int(np.clip(round(split_ratio * n_traj), 1, n_traj - 1))
    order = make_rng(seed, _SPLIT_STREAM).permutation(n_traj)
    part = np.full(n_traj, TEST, dtype=np.uint8)
    part[order[:n_train]] = TRAIN
    return part


def build_dataset(cfg: ScenarioConfig, n_traj: int, k: int = 15, horizons: Iterable[int] = (1,),
                  split_ratio: float = 0.815, seed: int | None = None, threads: int | None = None) -> Dataset:
    """Generate ``n_traj`` trajectories and split them into train/test at trajectory level.

    Trajectory ``i`` draws from the stream spawned at index ``i`` of ``seed``,
    so threaded and serial generation agree bit for bit.
    """
    seed = cfg.seed if seed is None else seed
    horizons = list(horizons)
    for h in horizons:
        if window_count(cfg.n_snapshots, k, h) == 0:
            raise ValueError(f"T={cfg.n_snapshots} too short for K={k}, horizon={h}")
    part = split_partition(n_traj, split_ratio, seed)
    speeds = trajectory_speeds(cfg, n_traj)

    def one(i: int):
        return generate_trajectory(cfg, make_rng(seed, i), speed_kmh=speeds[i], seed_index=i).snapshots

    workers = threads or _threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            snaps = list(pool.map(one, range(n_traj)))
    else:
        snaps = [one(i) for i in range(n_traj)]
    return Dataset(
        snapshots=np.stack(snaps),
        speeds_kmh=speeds,
        scenario_ids=np.full(n_traj, cfg.scenario_id, dtype=np.int64),
        seed_indices=np.arange(n_traj, dtype=np.int64),
        partition=part,
    )


def write_dataset(ds: Dataset, fh_or_path, dtype=np.float64) -> None:
    code = {np.dtype(v): k for k, v in _DTYPES.items()}[np.dtype(dtype)]
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack("<IIIIB", VERSION, ds.n_antennas, ds.n_snapshots, ds.n_traj, code))
    for i in range(ds.n_traj):
        speed_mm = int(round(ds.speeds_kmh[i] / 3.6 * 1000.0))
        buf.write(struct.pack("<QQQ", speed_mm, int(ds.scenario_ids[i]), int(ds.seed_indices[i])))
    pairs = np.stack([ds.snapshots.real, ds.snapshots.imag], axis=-1)
    buf.write(np.ascontiguousarray(pairs, dtype=np.dtype(dtype).newbyteorder("<")).tobytes())
    buf.write(SPLIT_MAGIC)
    buf.write(struct.pack("<I", ds.n_traj))
    buf.write(np.asarray(ds.partition, dtype=np.uint8).tobytes())
    data = buf.getvalue()
    if isinstance(fh_or_path, (str, Path)):
        Path(fh_or_path).write_bytes(data)
    else:
        fh_or_path.write(data)


def read_dataset(fh_or_path, split_ratio: float = 0.815, seed: int = 0) -> Dataset:
    """Read a CHPD file; without a split trailer the partition is rebuilt from ``split_ratio``/``seed``."""
    if isinstance(fh_or_path, (str, Path)):
        data = Path(fh_or_path).read_bytes()
    else:
        data = fh_or_path.read()
    if data[:4] != MAGIC:
        raise ValueError("not a CHPD dataset file")
    version, n_b, t, n_traj, code = struct.unpack_from("<IIIIB", data, 4)
    if version != VERSION:
        raise ValueError(f"unsupported CHPD version {version}")
    if code not in _DTYPES:
        raise ValueError(f"unknown sample dtype code {code}")
    pos = 4 + struct.calcsize("<IIIIB")
    meta = np.frombuffer(data, dtype="<u8", count=3 * n_traj, offset=pos).reshape(n_traj, 3)
    pos += 24 * n_traj
    dt = np.dtype(_DTYPES[code]).newbyteorder("<")
    count = n_traj * t * n_b * 2
    if len(data) < pos + count * dt.itemsize:
        raise ValueError("truncated CHPD file")
    pairs = np.frombuffer(data, dtype=dt, count=count, offset=pos).reshape(n_traj, t, n_b, 2)
    pos += count * dt.itemsize
    snaps = pairs[..., 0].astype(np.float64) + 1j * pairs[..., 1].astype(np.float64)
    if data[pos:pos + 4] == SPLIT_MAGIC:
        (n,) = struct.unpack_from("<I", data, pos + 4)
        part = np.frombuffer(data, dtype=np.uint8, count=n, offset=pos + 8).copy()
    else:
        part = split_partition(n_traj, split_ratio, seed)
    return Dataset(
        snapshots=snaps,
        speeds_kmh=meta[:, 0].astype(np.float64) / 1000.0 * 3.6,
        scenario_ids=meta[:, 1].astype(np.int64),
        seed_indices=meta[:, 2].astype(np.int64),
        partition=part,
    )
