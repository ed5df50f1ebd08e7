"""Single-bounce scatterer geometry and the multipath channel response.

The BS array sits in the y-z plane at ``(0, 0, bs_height)`` facing +x. A
path's departure direction points from the BS toward its scatterer (or the
UE for the direct path); its arrival direction points from the UE toward
the scatterer (or the BS).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import LOS, SPEED_OF_LIGHT, ScenarioConfig

COLLISION_DISTANCE = 0.1


def antenna_positions(cfg: ScenarioConfig) -> np.ndarray:
    """Element positions (N_b, 3) relative to the array origin.

    Polarization-major ordering: the first ``n_col * n_row`` rows are the
    +45 degree elements, then the -45 degree ones, each grid walked
    row-major (vertical index outer, horizontal index inner).
    """
    d = cfg.spacing
    rows, cols = np.meshgrid(np.arange(cfg.n_col), np.arange(cfg.n_row), indexing="ij")
    grid = np.stack([np.zeros(rows.size), cols.ravel() * d, rows.ravel() * d], axis=1)
    return np.concatenate([grid, grid], axis=0)


def polarization_index(cfg: ScenarioConfig) -> np.ndarray:
    """0 for +45 degree elements, 1 for -45 degree elements."""
    half = cfg.n_col * cfg.n_row
    return np.repeat([0, 1], half)


def bs_origin(cfg: ScenarioConfig) -> np.ndarray:
    return np.array([0.0, 0.0, cfg.bs_height])


def spherical_unit(azimuth: np.ndarray, elevation: np.ndarray) -> np.ndarray:
    """Unit vector from azimuth and zenith-measured elevation angle."""
    azimuth = np.asarray(azimuth, dtype=float)
    elevation = np.asarray(elevation, dtype=float)
    return np.stack(
        [np.sin(elevation) * np.cos(azimuth), np.sin(elevation) * np.sin(azimuth), np.cos(elevation)],
        axis=-1,
    )


def unit_to_angles(r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`spherical_unit`: (azimuth, elevation)."""
    return np.arctan2(r[..., 1], r[..., 0]), np.arccos(np.clip(r[..., 2], -1.0, 1.0))


@dataclass
class PathSet:
    """Random part of one scattering environment.

    ``scatterers`` holds NaN rows for direct paths. ``gains`` is (L, 2)
    complex, one column per polarization.
    """

    scatterers: np.ndarray
    direct: np.ndarray
    gains: np.ndarray
    ue_start: np.ndarray
    regenerated: int = 0

    @property
    def n_paths(self) -> int:
        return self.gains.shape[0]


@dataclass
class PathGeometry:
    """Path directions and delays seen from one UE position.

    ``r_tx``/``r_rx`` are (..., L, 3) unit vectors and ``delays`` (..., L)
    seconds, with any leading axes indexing UE positions.
    """

    gains: np.ndarray
    r_tx: np.ndarray
    r_rx: np.ndarray
    delays: np.ndarray

    @property
    def aod(self):
        return unit_to_angles(self.r_tx)

    @property
    def aoa(self):
        return unit_to_angles(self.r_rx)


def _sample_ue_start(cfg: ScenarioConfig, rng: np.random.Generator) -> np.ndarray:
    dist = rng.uniform(*cfg.ue_distance)
    az = np.deg2rad(rng.uniform(-cfg.ue_sector_deg, cfg.ue_sector_deg))
    return np.array([dist * np.cos(az), dist * np.sin(az), cfg.ue_height])


def _sample_scatterers(cfg: ScenarioConfig, rng: np.random.Generator, centre: np.ndarray, n: int) -> np.ndarray:
    r_lo, r_hi = cfg.scatter_radius
    # uniform over the annulus area
    radius = np.sqrt(rng.uniform(r_lo**2, r_hi**2, size=n))
    az = rng.uniform(0.0, 2 * np.pi, size=n)
    height = rng.uniform(*cfg.scatter_height, size=n)
    return np.stack([centre[0] + radius * np.cos(az), centre[1] + radius * np.sin(az), height], axis=1)


def path_powers(cfg: ScenarioConfig, n_scattered: int, rng: np.random.Generator) -> np.ndarray:
    """Exponential PDP over delay rank with log-normal per-path shadowing."""
    if n_scattered == 1:
        ramp = np.zeros(1)
    else:
        ramp = -cfg.pdp_decay_db * np.arange(n_scattered) / (n_scattered - 1)
    db = ramp + cfg.shadow_std_db * rng.standard_normal(n_scattered)
    p = 10.0 ** (db / 10.0)
    return p / p.sum()


def _polarized_gains(cfg: ScenarioConfig, power: np.ndarray, rng: np.random.Generator,
                     direct: np.ndarray) -> np.ndarray:
    n = power.size
    phases = np.exp(2j * np.pi * rng.uniform(size=(n, 2)))
    xpd = 10.0 ** (cfg.xpd_db / 10.0)
    co = np.sqrt(xpd / (1.0 + xpd))
    cross = np.sqrt(1.0 / (1.0 + xpd))
    raw = np.empty((n, 2), complex)
    raw[:, 0] = co * phases[:, 0] + cross * phases[:, 1]
    raw[:, 1] = co * phases[:, 1] + cross * phases[:, 0]
    # the direct path is not depolarized
    raw[direct] = phases[direct]
    scale = np.sqrt(2.0 * power / np.sum(np.abs(raw) ** 2, axis=1))
    return raw * scale[:, None]


def sample_paths(cfg: ScenarioConfig, rng: np.random.Generator, ue_start: np.ndarray | None = None) -> PathSet:
    """Draw UE start position, scatterers and complex path gains.

    The LOS preset spends one of its ``n_paths`` on the direct ray, which
    carries ``K/(K+1)`` of the power. Gains are scaled so that the summed
    power over paths and both polarizations is exactly 2.
    """
    if ue_start is None:
        ue_start = _sample_ue_start(cfg, rng)
    ue_start = np.asarray(ue_start, dtype=float)
    n_direct = 1 if cfg.name == LOS else 0
    n_scat = cfg.n_paths - n_direct
    centre = 0.5 * (bs_origin(cfg) + ue_start)
    scat = _sample_scatterers(cfg, rng, centre, n_scat)
    # order scattered paths by delay so the PDP decays with delay
    bs = bs_origin(cfg)
    length = np.linalg.norm(scat - bs, axis=1) + np.linalg.norm(ue_start - scat, axis=1)
    scat = scat[np.argsort(length, kind="stable")]
    p_scat = path_powers(cfg, n_scat, rng)
    if n_direct:
        k = 10.0 ** (cfg.k_factor_db / 10.0)
        power = np.concatenate([[k / (k + 1.0)], p_scat / (k + 1.0)])
        scat = np.concatenate([np.full((1, 3), np.nan), scat])
    else:
        power = p_scat
    direct = np.zeros(cfg.n_paths, bool)
    direct[:n_direct] = True
    gains = _polarized_gains(cfg, power, rng, direct)
    return PathSet(scatterers=scat, direct=direct, gains=gains, ue_start=ue_start)


def path_geometry(cfg: ScenarioConfig, paths: PathSet, ue_pos: np.ndarray) -> PathGeometry:
    """Exact single-bounce directions and delays at UE position(s) ``ue_pos`` (..., 3)."""
    ue = np.asarray(ue_pos, dtype=float)[..., None, :]
    bs = bs_origin(cfg)
    scat = np.where(paths.direct[:, None], np.nan, paths.scatterers)
    to_scat = scat - bs
    leg1 = np.linalg.norm(to_scat, axis=-1)
    leg2_vec = scat - ue
    leg2 = np.linalg.norm(leg2_vec, axis=-1)
    r_tx = np.broadcast_to(to_scat / leg1[:, None], leg2_vec.shape).copy()
    r_rx = leg2_vec / leg2[..., None]
    length = leg1 + leg2
    if paths.direct.any():
        los = ue - bs  # (..., 1, 3)
        dist = np.linalg.norm(los, axis=-1)
        d = paths.direct
        r_tx[..., d, :] = los / dist[..., None]
        r_rx[..., d, :] = -los / dist[..., None]
        length[..., d] = dist
    return PathGeometry(gains=paths.gains, r_tx=r_tx, r_rx=r_rx, delays=length / SPEED_OF_LIGHT)


def eval_channel(cfg: ScenarioConfig, geom: PathGeometry, delay_phase: np.ndarray,
                 doppler_phase: np.ndarray | None = None) -> np.ndarray:
    """Sum paths with array steering.

    ``h_b = sum_l a_{l,pol(b)} e^{j2pi r_tx.d_b/lambda} e^{j delay_l} e^{j doppler_l}``

    Both phase arrays have shape (..., L). They are exponentiated separately
    because the delay phase is large (about 1e4 rad) and adding a small
    Doppler term to it would round away ~1e-11 rad.
    """
    pos = antenna_positions(cfg)
    pol = polarization_index(cfg)
    steer = np.exp(2j * np.pi * (geom.r_tx @ pos.T) / cfg.wavelength)  # (..., L, N_b)
    g = geom.gains[:, pol]  # (L, N_b)
    rot = np.exp(1j * delay_phase)
    if doppler_phase is not None:
        rot = rot * np.exp(1j * doppler_phase)
    return np.einsum("...lb,lb,...l->...b", steer, g, rot)


def snapshot(cfg: ScenarioConfig, paths: PathSet, ue_pos: np.ndarray, t, mode: str | None = None,
             velocity: np.ndarray | None = None) -> np.ndarray:
    """Channel vector h(t) of length N_b.

    ``static``: geometry frozen at ``ue_pos`` and ``t`` (SRS index, may be an
    array) drives the linear Doppler phase with ``velocity``.
    ``drifting``: ``ue_pos`` is the current UE position; directions and delays
    are recomputed there and the phase is ``-2 pi f tau(t)``.
    """
    mode = mode or cfg.mode
    if mode == "static":
        if velocity is None:
            raise ValueError("static mode needs the UE velocity")
        geom = path_geometry(cfg, paths, ue_pos)
        t = np.asarray(t, dtype=float)
        doppler = (geom.r_rx @ np.asarray(velocity, float)) / cfg.wavelength  # (L,)
        return eval_channel(cfg, geom, -2 * np.pi * cfg.carrier_hz * geom.delays,
                            2 * np.pi * np.multiply.outer(t * cfg.srs_period, doppler))
    if mode == "drifting":
        geom = path_geometry(cfg, paths, ue_pos)
        return eval_channel(cfg, geom, -2 * np.pi * cfg.carrier_hz * geom.delays)
    raise ValueError(f"unknown mode {mode!r}")


def min_scatterer_distance(paths: PathSet, ue_positions: np.ndarray) -> np.ndarray:
    """Closest approach of the UE track to each scatterer (inf for direct paths)."""
    scat = paths.scatterers
    d = np.linalg.norm(ue_positions[:, None, :] - scat[None], axis=-1)
    d = np.where(paths.direct[None], np.inf, d)
    return d.min(axis=0)
