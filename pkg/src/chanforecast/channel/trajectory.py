"""UE tracks and per-trajectory channel sequences."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig
from .geometry import (
    COLLISION_DISTANCE,
    PathSet,
    _sample_scatterers,
    bs_origin,
    min_scatterer_distance,
    sample_paths,
    snapshot,
)


@dataclass
class Trajectory:
    cfg: ScenarioConfig
    paths: PathSet
    positions: np.ndarray  # (T, 3)
    velocities: np.ndarray  # (T, 3)
    snapshots: np.ndarray  # (T, N_b) complex
    speed_ms: float
    seed_index: int = 0

    @property
    def heading(self) -> np.ndarray:
        return np.arctan2(self.velocities[:, 1], self.velocities[:, 0])

    def __len__(self) -> int:
        return self.snapshots.shape[0]


def velocity_vector(speed: float, azimuth, elevation=np.pi / 2) -> np.ndarray:
    """Velocity ``v [sin(el) cos(az), sin(el) sin(az), cos(el)]``."""
    azimuth = np.asarray(azimuth, dtype=float)
    elevation = np.broadcast_to(np.asarray(elevation, dtype=float), azimuth.shape)
    return speed * np.stack(
        [np.sin(elevation) * np.cos(azimuth), np.sin(elevation) * np.sin(azimuth), np.cos(elevation)], axis=-1
    )


def ue_track(cfg: ScenarioConfig, start: np.ndarray, azimuth0: float, speed: float,
             n: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Positions and velocities for ``n`` SRS instants (horizontal motion)."""
    n = cfg.n_snapshots if n is None else n
    k = np.arange(n)
    if cfg.trajectory == "linear":
        az = np.full(n, azimuth0)
    else:
        # heading turns at v / R rad per second
        az = azimuth0 + speed / cfg.circle_radius * cfg.srs_period * k
    vel = velocity_vector(speed, az)
    steps = vel * cfg.srs_period
    pos = np.empty((n, 3))
    pos[0] = start
    if n > 1:
        pos[1:] = start + np.cumsum(steps[:-1], axis=0)
    return pos, vel


def generate_trajectory(cfg: ScenarioConfig, rng: np.random.Generator, speed_kmh: float | None = None,
                        seed_index: int = 0) -> Trajectory:
    """Sample an environment and move the UE through it for ``cfg.n_snapshots`` SRS periods.

    Scatterers that the track passes closer than 10 cm to are redrawn; the
    count is kept in ``paths.regenerated``.
    """
    speed = (cfg.speed_kmh if speed_kmh is None else speed_kmh) / 3.6
    paths = sample_paths(cfg, rng)
    azimuth0 = rng.uniform(0.0, 2 * np.pi)
    pos, vel = ue_track(cfg, paths.ue_start, azimuth0, speed)
    centre = 0.5 * (bs_origin(cfg) + paths.ue_start)
    for _ in range(100):
        bad = min_scatterer_distance(paths, pos) < COLLISION_DISTANCE
        if not bad.any():
            break
        paths.scatterers[bad] = _sample_scatterers(cfg, rng, centre, int(bad.sum()))
        paths.regenerated += int(bad.sum())
    if cfg.mode == "static":
        h = snapshot(cfg, paths, pos[0], np.arange(cfg.n_snapshots), mode="static", velocity=vel[0])
    else:
        h = snapshot(cfg, paths, pos, None, mode="drifting")
    return Trajectory(cfg=cfg, paths=paths, positions=pos, velocities=vel, snapshots=h,
                      speed_ms=speed, seed_index=seed_index)
