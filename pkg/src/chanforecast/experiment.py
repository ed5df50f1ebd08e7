"""Method evaluation and the scaled-down comparison runs.

The desk-scale setting keeps the full architecture but trains a narrower
LSTM for fewer epochs on a handful of trajectories, so that every method
can be compared on one CPU in minutes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .analysis.metrics import cosine_similarity, nmse
from .channel.config import preset
from .channel.dataset import Dataset, WindowBatch, build_dataset
from .nn.params import ParamStore
from .predictors.baselines import ar_predict, sh_predict
from .predictors.beamforming import zf_beamform
from .predictors.lpcnet import LpcnetConfig, config_for_kind, predict
from .predictors.training import train

log = logging.getLogger(__name__)

EVAL_CHUNK = 1024

# display names of the compared methods
METHOD_LABELS = {
    "sh": "SH",
    "ar": "AR",
    "lstm": "LSTM",
    "lpcnet": "LPCNet",
    "jlpcnet": "JLPCNet",
}


@dataclass(frozen=True)
class MethodScore:
    """Per-sample NMSE and cosine similarity of one method on a window set."""

    nmse: np.ndarray
    cosine: np.ndarray

    @property
    def mean_nmse(self) -> float:
        return float(np.mean(self.nmse))

    @property
    def nmse_db(self) -> float:
        return float(10.0 * np.log10(self.mean_nmse))

    @property
    def cosine_pct(self) -> float:
        return float(100.0 * np.mean(self.cosine))

    @property
    def n(self) -> int:
        return int(self.cosine.size)


def method_output(kind: str, past: np.ndarray, horizon: int, params: ParamStore | None = None,
                  cfg: LpcnetConfig | None = None) -> np.ndarray:
    """Predicted CSI for every method except ``jlpcnet``, whose output is a beam."""
    if kind == "sh":
        return sh_predict(past, horizon)
    if kind == "ar":
        return ar_predict(past, horizon).prediction
    if params is None or cfg is None:
        raise ValueError(f"{kind} needs trained parameters and a config")
    if cfg.horizon != horizon:
        raise ValueError(f"model trained for horizon {cfg.horizon}, asked for {horizon}")
    out = [predict(kind, past[s:s + EVAL_CHUNK], params, cfg) for s in range(0, past.shape[0], EVAL_CHUNK)]
    return np.concatenate(out, axis=0)


def score_method(kind: str, windows: WindowBatch, params: ParamStore | None = None,
                 cfg: LpcnetConfig | None = None) -> MethodScore:
    """NMSE of the CSI prediction and cosine similarity of the resulting beam.

    CSI predictors are scored through ZF, i.e. ``cos(zf(h_hat), zf(h))``;
    JLPCNet's output is a beam already, so its NMSE is undefined (NaN).
    """
    out = method_output(kind, windows.past, windows.horizon, params, cfg)
    truth_beam = zf_beamform(windows.target)
    if kind == "jlpcnet":
        return MethodScore(np.full(len(windows), np.nan), cosine_similarity(out, truth_beam))
    return MethodScore(nmse(out, windows.target), cosine_similarity(zf_beamform(out), truth_beam))


# Ablation variants on the LPCNet network; the residual follows the
# differencing preprocessor unless set explicitly.
VARIANTS = {
    "lpcnet": {},
    "only_j": {"enable_diff": False},
    "only_c": {"enable_adjuster": False},
    "without_cj": {"enable_diff": False, "enable_adjuster": False},
}


@dataclass(frozen=True)
class DeskSetting:
    """Scaled-down comparison setting."""

    scenario: str = "NLOS"
    speed_kmh: float = 60.0
    horizon: int = 1
    n_traj: int = 8
    n_snapshots: int = 850
    split_ratio: float = 0.75
    k: int = 15
    hidden: int = 64
    weight_hidden: int = 64
    bias_hidden: int = 64
    epochs: int = 50
    lr: float = 1e-3
    batch_size: int = 100
    dtype: str = "f32"

    def model_config(self, n_antennas: int) -> LpcnetConfig:
        return LpcnetConfig(k=self.k, n_antennas=n_antennas, hidden=self.hidden,
                            weight_hidden=self.weight_hidden, bias_hidden=self.bias_hidden,
                            horizon=self.horizon, lr=self.lr, batch_size=self.batch_size, epochs=self.epochs)

    def dataset(self, seed: int) -> Dataset:
        cfg = preset(self.scenario, speed_kmh=self.speed_kmh, n_snapshots=self.n_snapshots, seed=seed)
        return build_dataset(cfg, self.n_traj, self.k, (self.horizon,), self.split_ratio, seed=seed, threads=1)


@dataclass
class DeskResult:
    setting: DeskSetting
    seed: int
    scores: dict[str, MethodScore] = field(default_factory=dict)
    n_train: int = 0
    final_losses: dict[str, float] = field(default_factory=dict)


def run_desk(setting: DeskSetting, seed: int, methods=("sh", "ar", "lstm", "lpcnet", "jlpcnet"),
             variants=()) -> DeskResult:
    """Generate data with ``seed``, train every neural method with ``seed`` and score on the test split.

    ``variants`` names entries of :data:`VARIANTS` trained in addition; a
    variant that coincides with a listed method reuses its result.
    """
    ds = setting.dataset(seed)
    tr = ds.windows(setting.k, setting.horizon, "train")
    te = ds.windows(setting.k, setting.horizon, "test")
    base = setting.model_config(ds.n_antennas)
    dtype = np.float32 if setting.dtype == "f32" else np.float64
    res = DeskResult(setting, seed, n_train=len(tr))
    jobs = [(m, m, base) for m in methods]
    for v in variants:
        jobs.append((f"variant:{v}", "lpcnet", base.with_(**VARIANTS[v])))
    # identical networks under the same loss train identically; "without C and J" is the LSTM
    done = {}
    for name, kind, cfg in jobs:
        if kind in ("sh", "ar"):
            res.scores[name] = score_method(kind, te)
            continue
        net = config_for_kind(kind, cfg)
        key = (kind == "jlpcnet", net.with_(enable_residual=net.residual))
        if key in done:
            res.final_losses[name], res.scores[name] = done[key]
            continue
        log.info("desk run seed %d: training %s", seed, name)
        out = train(kind, tr, cfg, seed=seed, dtype=dtype)
        res.final_losses[name] = out.final_loss
        res.scores[name] = score_method(kind, te, out.params, cfg)
        done[key] = (res.final_losses[name], res.scores[name])
    return res
