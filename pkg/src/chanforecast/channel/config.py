"""Scenario presets for the synthetic channel generator."""

from __future__ import annotations

from dataclasses import dataclass, replace

SPEED_OF_LIGHT = 299_792_458.0

LOS = "LOS"
NLOS = "NLOS"
SCENARIO_IDS = {LOS: 0, NLOS: 1}


@dataclass(frozen=True)
class ScenarioConfig:
    """Propagation, array and mobility settings for one scenario.

    Angular and delay statistics come from the scatterer geometry; the
    remaining defaults (K-factor, PDP decay, XPD, annulus) are typical
    urban-macro magnitudes.
    """

    name: str = NLOS
    n_paths: int = 21
    carrier_hz: float = 3.5e9
    n_col: int = 4  # antennas per column (N_l)
    n_row: int = 4  # antennas per row (N_r)
    pol_angle_deg: float = 45.0
    bs_height: float = 25.0
    ue_height: float = 1.5
    k_factor_db: float = 10.0
    pdp_decay_db: float = 20.0
    shadow_std_db: float = 3.0
    xpd_db: float = 8.0
    srs_period: float = 2e-3
    trajectory: str = "linear"
    speed_kmh: float = 60.0
    speed_range_kmh: tuple[float, float] | None = None
    n_snapshots: int = 700
    seed: int = 0
    scatter_radius: tuple[float, float] = (20.0, 200.0)
    scatter_height: tuple[float, float] = (1.5, 30.0)
    ue_distance: tuple[float, float] = (50.0, 250.0)
    ue_sector_deg: float = 60.0
    circle_radius: float = 40.0
    mode: str = "drifting"

    def __post_init__(self):
        if self.name not in SCENARIO_IDS:
            raise ValueError(f"unknown scenario {self.name!r}")
        if self.n_paths < 1 or self.n_col < 1 or self.n_row < 1:
            raise ValueError("path and antenna counts must be >= 1")
        if self.name == LOS and self.n_paths < 2:
            raise ValueError("LOS scenarios need a direct path plus at least one scattered path")
        if self.trajectory not in ("linear", "circular"):
            raise ValueError(f"unknown trajectory kind {self.trajectory!r}")
        if self.mode not in ("drifting", "static"):
            raise ValueError(f"unknown channel mode {self.mode!r}")
        if self.carrier_hz <= 0 or self.srs_period <= 0:
            raise ValueError("carrier frequency and SRS period must be positive")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    @property
    def spacing(self) -> float:
        return self.wavelength / 2.0

    @property
    def n_antennas(self) -> int:
        return 2 * self.n_col * self.n_row

    @property
    def speed_ms(self) -> float:
        return self.speed_kmh / 3.6

    @property
    def scenario_id(self) -> int:
        return SCENARIO_IDS[self.name]

    def with_(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)


def preset(name: str, **overrides) -> ScenarioConfig:
    """``LOS`` (12 paths, one direct) or ``NLOS`` (21 scattered paths)."""
    name = name.upper()
    if name in (LOS, "UMA-LOS", "LOS-LIKE"):
        base = ScenarioConfig(name=LOS, n_paths=12)
    elif name in (NLOS, "UMA-NLOS", "NLOS-LIKE"):
        base = ScenarioConfig(name=NLOS, n_paths=21)
    else:
        raise ValueError(f"unknown scenario preset {name!r}")
    return replace(base, **overrides) if overrides else base
