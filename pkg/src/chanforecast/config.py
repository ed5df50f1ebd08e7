"""Experiment configuration files.

The format is flat ``key = value`` text grouped under ``[section]`` headers,
with ``#`` comments. Keys are matched case-insensitively with spaces and
hyphens folded to underscores, so the human-readable parameter names
(``Number of neurons of LSTM = 256``) and their snake-case spellings are
interchangeable. Short symbols (``K``, ``N_z``, ``f`` ...) are accepted as
aliases. Numbers may carry a unit suffix (``3.5GHz``, ``2ms``, ``25m``).
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .channel.config import ScenarioConfig, preset
from .predictors.lpcnet import KINDS, LpcnetConfig


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


# canonical key -> aliases, per section
_KEYS = {
    "scenario": {
        "channel_generator": (),
        "communication_scenarios": ("communication_scenario", "scenario"),
        "communication_frequency": ("f",),
        "number_of_antennas_in_a_column": ("n_l",),
        "number_of_antennas_in_a_row": ("n_r",),
        "polarization_angles": (),
        "bs_height": (),
        "ue_trajectory": (),
        "period_of_srs": ("t_s",),
        "speed_kmh": ("speeds_kmh",),
        "speed_range_kmh": (),
        "number_of_paths": ("l", "n_paths"),
        "ue_height": (),
        "k_factor_db": (),
        "pdp_decay_db": (),
        "shadow_std_db": (),
        "xpd_db": (),
        "mode": (),
        "circle_radius": (),
    },
    "dataset": {
        "trajectories": ("n_traj", "scattering_environments"),
        "snapshots": ("t", "snapshots_per_trajectory"),
        "input_length": ("k",),
        "horizons_ms": ("prediction_lengths_ms",),
        "split_ratio": (),
    },
    "model": {
        "kind": (),
        "input_length": ("k",),
        "number_of_neurons_of_lstm": ("n_z",),
        "number_of_neurons_of_the_weight_adjusted_mlp": ("n_w",),
        "number_of_neurons_of_the_bias_adjusted_mlp": ("n_s",),
        "learning_rate": ("lr",),
        "batch_size": (),
        "epochs": (),
        "flags": (),
    },
    "run": {
        "seed": (),
        "deterministic": (),
        "out": ("output_directory",),
        "dtype": (),
    },
}

_ALIAS = {
    section: {alias: canon for canon, aliases in keys.items() for alias in (canon, *aliases)}
    for section, keys in _KEYS.items()
}

_UNITS = {
    "ghz": 1e9, "mhz": 1e6, "khz": 1e3, "hz": 1.0,
    "ms": 1e-3, "us": 1e-6, "s": 1.0,
    "km/h": 1.0, "kmh": 1.0, "m": 1.0, "deg": 1.0, "°": 1.0, "db": 1.0,
}
_NUMBER = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*([^\d\s].*)?$")

FLAG_NAMES = {"diff": "enable_diff", "adjuster": "enable_adjuster", "residual": "enable_residual"}


def normalize_key(key: str) -> str:
    """``"Number of neurons of LSTM, N_z"`` -> ``"number_of_neurons_of_lstm"``."""
    return re.sub(r"[\s\-]+", "_", key.split(",", 1)[0].strip().lower())


def parse_number(text: str) -> float:
    s = text.strip().lstrip("±")
    m = _NUMBER.match(s)
    if not m:
        raise ConfigError(f"not a number: {text!r}")
    value = float(m.group(1))
    unit = (m.group(2) or "").strip().lower()
    if unit:
        if unit not in _UNITS:
            raise ConfigError(f"unknown unit {unit!r} in {text!r}")
        value *= _UNITS[unit]
    return value


def parse_int(text: str) -> int:
    value = parse_number(text)
    if value != int(value):
        raise ConfigError(f"expected an integer, got {text!r}")
    return int(value)


def parse_list(text: str) -> list[float]:
    parts = [p for p in re.split(r"[,\s]+", text.strip()) if p]
    if not parts:
        raise ConfigError("empty list")
    return [parse_number(p) for p in parts]


def parse_bool(text: str) -> bool:
    s = text.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def parse_flags(text: str) -> dict[str, bool]:
    """``no-diff,no-adjuster`` style switches to LpcnetConfig field overrides."""
    out = {}
    for item in (p.strip().lower() for p in text.split(",")):
        if not item:
            continue
        value = not item.startswith("no-")
        name = item[3:] if item.startswith("no-") else item
        if name not in FLAG_NAMES:
            raise ConfigError(f"unknown model flag {item!r}")
        out[FLAG_NAMES[name]] = value
    return out


def read_sections(text: str) -> dict[str, dict[str, str]]:
    """Parse raw text into ``{section: {canonical key: raw value}}``."""
    parser = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#",), inline_comment_prefixes=("#",),
                                       strict=True, interpolation=None, default_section="\0")
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(" ".join(str(exc).split())) from None
    sections: dict[str, dict[str, str]] = {}
    for name in parser.sections():
        section = name.strip().lower()
        if section not in _KEYS:
            raise ConfigError(f"unknown section [{name}]")
        if section in sections:
            raise ConfigError(f"duplicate section [{name}]")
        sections[section] = {}
        for key, value in parser.items(name):
            canon = _ALIAS[section].get(normalize_key(key))
            if canon is None:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            # two spellings of the same key
            if canon in sections[section]:
                raise ConfigError(f"duplicate key {canon!r} in [{section}]")
            sections[section][canon] = value.strip()
    return sections


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: ScenarioConfig = field(default_factory=lambda: preset("NLOS"))
    speeds_kmh: tuple[float, ...] = (60.0,)
    speed_range_kmh: tuple[float, float] | None = None
    horizons_ms: tuple[float, ...] = (2.0,)
    k: int = 15
    n_traj: int = 8
    n_snapshots: int = 700
    split_ratio: float = 0.815
    kind: str = "lpcnet"
    model: LpcnetConfig = field(default_factory=LpcnetConfig)
    seed: int = 0
    deterministic: bool = False
    out: str = "out"
    dtype: str = "f64"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown model kind {self.kind!r}")
        if self.dtype not in ("f32", "f64"):
            raise ConfigError("dtype must be f32 or f64")
        if self.n_traj < 2:
            raise ConfigError("need at least two trajectories")
        if not 0.0 < self.split_ratio < 1.0:
            raise ConfigError("split_ratio must lie in (0, 1)")
        if self.seed < 0 or self.seed >= 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if not self.speeds_kmh and self.speed_range_kmh is None:
            raise ConfigError("no speed given")
        self.horizon_steps()

    @property
    def np_dtype(self):
        return np.float32 if self.dtype == "f32" else np.float64

    def horizon_steps(self) -> tuple[int, ...]:
        """Horizons as SRS-period multiples; each must be a positive integer multiple."""
        period_ms = self.scenario.srs_period * 1e3
        steps = []
        for h in self.horizons_ms:
            ratio = h / period_ms
            if h <= 0 or abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
                raise ConfigError(f"horizon {h} ms is not a positive multiple of the SRS period ({period_ms} ms)")
            steps.append(int(round(ratio)))
        return tuple(steps)

    def speed_settings(self) -> list[tuple[str, ScenarioConfig]]:
        """(label, scenario) per dataset to generate: one per listed speed, or one mixed-speed range."""
        base = self.scenario.with_(n_snapshots=self.n_snapshots, seed=self.seed)
        if self.speed_range_kmh is not None:
            lo, hi = self.speed_range_kmh
            return [(f"{lo:g}-{hi:g}", base.with_(speed_range_kmh=(lo, hi), speed_kmh=hi))]
        return [(f"{v:g}", base.with_(speed_kmh=v)) for v in self.speeds_kmh]

    def model_config(self, horizon: int) -> LpcnetConfig:
        return self.model.with_(k=self.k, n_antennas=self.scenario.n_antennas, horizon=horizon)

    def with_(self, **changes) -> "ExperimentConfig":
        names = {f.name for f in fields(self)}
        bad = set(changes) - names
        if bad:
            raise ConfigError(f"unknown fields {sorted(bad)}")
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d.update(changes)
        return ExperimentConfig(**d)

    def echo(self) -> dict:
        """Every setting as canonical ``section -> key -> value`` text, for manifests."""
        s, m = self.scenario, self.model
        return {
            "scenario": {
                "channel_generator": "gbsm",
                "communication_scenarios": f"UMA-{s.name}",
                "communication_frequency": repr(s.carrier_hz),
                "number_of_antennas_in_a_column": str(s.n_col),
                "number_of_antennas_in_a_row": str(s.n_row),
                "polarization_angles": repr(s.pol_angle_deg),
                "bs_height": repr(s.bs_height),
                "ue_trajectory": s.trajectory,
                "period_of_srs": repr(s.srs_period),
                "speed_kmh": ",".join(f"{v:g}" for v in self.speeds_kmh),
                "speed_range_kmh": "" if self.speed_range_kmh is None else ",".join(f"{v:g}" for v in self.speed_range_kmh),
                "number_of_paths": str(s.n_paths),
                "ue_height": repr(s.ue_height),
                "k_factor_db": repr(s.k_factor_db),
                "pdp_decay_db": repr(s.pdp_decay_db),
                "shadow_std_db": repr(s.shadow_std_db),
                "xpd_db": repr(s.xpd_db),
                "mode": s.mode,
                "circle_radius": repr(s.circle_radius),
            },
            "dataset": {
                "trajectories": str(self.n_traj),
                "snapshots": str(self.n_snapshots),
                "input_length": str(self.k),
                "horizons_ms": ",".join(f"{h:g}" for h in self.horizons_ms),
                "split_ratio": repr(self.split_ratio),
            },
            "model": {
                "kind": self.kind,
                "number_of_neurons_of_lstm": str(m.hidden),
                "number_of_neurons_of_the_weight_adjusted_mlp": str(m.weight_hidden),
                "number_of_neurons_of_the_bias_adjusted_mlp": str(m.bias_hidden),
                "learning_rate": repr(m.lr),
                "batch_size": str(m.batch_size),
                "epochs": str(m.epochs),
                "flags": format_flags(m),
            },
            "run": {
                "seed": str(self.seed),
                "deterministic": "true" if self.deterministic else "false",
                "out": self.out,
                "dtype": self.dtype,
            },
        }

    def to_text(self) -> str:
        lines = []
        for section, items in self.echo().items():
            lines.append(f"[{section}]")
            lines.extend(f"{k} = {v}" for k, v in items.items())
            lines.append("")
        return "\n".join(lines)


def format_flags(m: LpcnetConfig) -> str:
    parts = ["diff" if m.enable_diff else "no-diff", "adjuster" if m.enable_adjuster else "no-adjuster"]
    if m.enable_residual is not None:
        parts.append("residual" if m.enable_residual else "no-residual")
    return ",".join(parts)


def _scenario_from(items: dict[str, str]) -> ScenarioConfig:
    name = items.get("communication_scenarios", "UMA-NLOS")
    try:
        base = preset(name)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    gen = items.get("channel_generator", "gbsm").strip().lower()
    if gen != "gbsm":
        raise ConfigError(f"unsupported channel generator {gen!r}; only the built-in 'gbsm' exists")
    conv = {
        "communication_frequency": ("carrier_hz", parse_number),
        "number_of_antennas_in_a_column": ("n_col", parse_int),
        "number_of_antennas_in_a_row": ("n_row", parse_int),
        "polarization_angles": ("pol_angle_deg", parse_number),
        "bs_height": ("bs_height", parse_number),
        "ue_trajectory": ("trajectory", lambda v: v.strip().lower().split()[0]),
        "period_of_srs": ("srs_period", parse_number),
        "number_of_paths": ("n_paths", parse_int),
        "ue_height": ("ue_height", parse_number),
        "k_factor_db": ("k_factor_db", parse_number),
        "pdp_decay_db": ("pdp_decay_db", parse_number),
        "shadow_std_db": ("shadow_std_db", parse_number),
        "xpd_db": ("xpd_db", parse_number),
        "mode": ("mode", lambda v: v.strip().lower()),
        "circle_radius": ("circle_radius", parse_number),
    }
    changes = {}
    for key, (attr, fn) in conv.items():
        if key in items:
            changes[attr] = fn(items[key])
    try:
        return base.with_(**changes)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def parse_config(text: str, **overrides) -> ExperimentConfig:
    """Build an :class:`ExperimentConfig` from config text; ``overrides`` replace parsed fields."""
    sec = read_sections(text)
    sc = sec.get("scenario", {})
    ds = sec.get("dataset", {})
    md = sec.get("model", {})
    rn = sec.get("run", {})
    kw: dict = {"scenario": _scenario_from(sc)}
    if "speed_kmh" in sc:
        kw["speeds_kmh"] = tuple(parse_list(sc["speed_kmh"]))
    if sc.get("speed_range_kmh"):
        rng = parse_list(sc["speed_range_kmh"])
        if len(rng) != 2 or rng[0] > rng[1]:
            raise ConfigError("speed_range_kmh needs two values lo, hi with lo <= hi")
        kw["speed_range_kmh"] = (rng[0], rng[1])
    if "trajectories" in ds:
        kw["n_traj"] = parse_int(ds["trajectories"])
    if "snapshots" in ds:
        kw["n_snapshots"] = parse_int(ds["snapshots"])
    if "input_length" in ds:
        kw["k"] = parse_int(ds["input_length"])
    if "horizons_ms" in ds:
        kw["horizons_ms"] = tuple(parse_list(ds["horizons_ms"]))
    if "split_ratio" in ds:
        kw["split_ratio"] = parse_number(ds["split_ratio"])
    if "input_length" in md:
        if "input_length" in ds:
            raise ConfigError("input_length given in both [dataset] and [model]")
        kw["k"] = parse_int(md["input_length"])
    if "kind" in md:
        kw["kind"] = md["kind"].strip().lower()
    mkw = {}
    for key, attr, fn in (
        ("number_of_neurons_of_lstm", "hidden", parse_int),
        ("number_of_neurons_of_the_weight_adjusted_mlp", "weight_hidden", parse_int),
        ("number_of_neurons_of_the_bias_adjusted_mlp", "bias_hidden", parse_int),
        ("learning_rate", "lr", parse_number),
        ("batch_size", "batch_size", parse_int),
        ("epochs", "epochs", parse_int),
    ):
        if key in md:
            mkw[attr] = fn(md[key])
    if "flags" in md:
        mkw.update(parse_flags(md["flags"]))
    if "seed" in rn:
        kw["seed"] = parse_int(rn["seed"])
    if "deterministic" in rn:
        kw["deterministic"] = parse_bool(rn["deterministic"])
    if "out" in rn:
        kw["out"] = rn["out"]
    if "dtype" in rn:
        kw["dtype"] = rn["dtype"].strip().lower()
    kw.update(overrides)
    try:
        if mkw:
            kw["model"] = LpcnetConfig(**mkw) if "model" not in overrides else overrides["model"].with_(**mkw)
        cfg = ExperimentConfig(**kw)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    if cfg.k < 2:
        raise ConfigError("input length K must be >= 2")
    for h in cfg.horizon_steps():
        if cfg.n_snapshots - cfg.k - h + 1 < 1:
            raise ConfigError(f"trajectories of {cfg.n_snapshots} snapshots are too short for K={cfg.k}, horizon={h}")
    return cfg


def load_config(path: str | Path | None, **overrides) -> ExperimentConfig:
    if path is None:
        return parse_config("", **overrides)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, **overrides)

