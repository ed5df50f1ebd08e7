"""LSTM encoder with a hypernetwork-adjusted linear readout.

One model class covers three predictors:

* ``lpcnet``: differenced input, adjuster MLPs, residual add of the newest snapshot.
* ``lstm``: the same network with every feature switched off (raw input,
  static readout, no residual).
* ``jlpcnet``: the ``lpcnet`` network read as a beamforming vector
  ``w_hat = conj(u)`` and trained on the cosine loss.

Flags can be mixed freely for ablations. Everything operates on batches of
windows shaped (B, K, N_b), oldest snapshot first.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from ..nn.layers import lstm_sequence_backward, lstm_sequence_forward, lstm_specs, mlp2_backward, mlp2_forward, mlp2_specs
from ..nn.params import ADJUST_BIAS, ADJUST_WEIGHT, BIAS, WEIGHT, ParamSpec, ParamStore, init_params
from ..numerics import complex_to_real, real_to_complex

KINDS = ("sh", "ar", "lstm", "lpcnet", "jlpcnet")
NEURAL_KINDS = ("lstm", "lpcnet", "jlpcnet")


@dataclass(frozen=True)
class LpcnetConfig:
    k: int = 15
    n_antennas: int = 32
    hidden: int = 256
    weight_hidden: int = 64
    bias_hidden: int = 64
    horizon: int = 1
    enable_diff: bool = True
    enable_adjuster: bool = True
    # None ties the residual to the differencing preprocessor
    enable_residual: bool | None = None
    lr: float = 1e-4
    batch_size: int = 200
    epochs: int = 1000

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("input length K must be >= 2")
        for name in ("n_antennas", "hidden", "weight_hidden", "bias_hidden", "horizon", "batch_size", "epochs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.lr <= 0:
            raise ValueError("learning rate must be positive")

    @property
    def n_in(self) -> int:
        """Adjuster input width, one value per differenced step."""
        return self.k - 1

    @property
    def residual(self) -> bool:
        return self.enable_diff if self.enable_residual is None else self.enable_residual

    @property
    def feature_dim(self) -> int:
        return 2 * self.n_antennas

    def with_(self, **changes) -> "LpcnetConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "LpcnetConfig":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})


def config_for_kind(kind: str, cfg: LpcnetConfig) -> LpcnetConfig:
    """The plain LSTM baseline is the flags-off network."""
    if kind == "lstm":
        return cfg.with_(enable_diff=False, enable_adjuster=False, enable_residual=False)
    return cfg


def param_specs(cfg: LpcnetConfig) -> list[ParamSpec]:
    nz, d = cfg.hidden, cfg.feature_dim
    specs = lstm_specs("lstm", d, nz)
    specs += [ParamSpec("readout.W", (d, nz), WEIGHT), ParamSpec("readout.b", (d,), BIAS)]
    if cfg.enable_adjuster:
        specs += mlp2_specs("wadj", cfg.n_in, cfg.weight_hidden, nz, ADJUST_WEIGHT, ADJUST_BIAS)
        specs += mlp2_specs("badj", cfg.n_in, cfg.bias_hidden, 1, ADJUST_WEIGHT, ADJUST_BIAS)
    return specs


def parameter_count_formula(n_antennas: int, hidden: int, n_in: int, weight_hidden: int, bias_hidden: int) -> int:
    """Closed-form LPCNet size: LSTM + dynamic linear layer + both adjuster MLPs."""
    nb, nz, ni, nw, ns = n_antennas, hidden, n_in, weight_hidden, bias_hidden
    return (10 * nb * nz + 4 * nz * nz + ni * ns + ni * nw + nw * nz
            + 5 * nz + 2 * nb + 2 * ns + nw + 1)


def init_model(cfg: LpcnetConfig, rng: np.random.Generator, dtype=np.float64) -> ParamStore:
    return init_params(param_specs(cfg), rng, dtype)


def difference_preprocess(seq: np.ndarray) -> np.ndarray:
    """First-order difference along the time axis (axis -2): ``s_t = x_{t+1} - x_t``."""
    seq = np.asarray(seq)
    if seq.shape[-2] < 2:
        raise ValueError("need at least two steps to difference")
    return seq[..., 1:, :] - seq[..., :-1, :]


def _as_batch(past: np.ndarray) -> tuple[np.ndarray, bool]:
    past = np.asarray(past)
    if past.ndim == 2:
        return past[None], True
    return past, False


def forward_real(hbar: np.ndarray, params: ParamStore, cfg: LpcnetConfig, adjust_override=None):
    """Network on real-layout windows ``hbar`` (B, K, 2N_b).

    Returns (output (B, 2N_b), cache). ``adjust_override=(Wa, ba)`` replaces
    the adjuster outputs, which is how the identity-adjuster check works.
    """
    b, k, d = hbar.shape
    if k != cfg.k or d != cfg.feature_dim:
        raise ValueError(f"window shape (K={k}, 2N_b={d}) does not match config (K={cfg.k}, 2N_b={cfg.feature_dim})")
    if cfg.enable_diff:
        seq = difference_preprocess(hbar)
        lstm_in, adj_in = seq, seq
    else:
        lstm_in, adj_in = hbar, hbar[:, 1:]
    z, lcache = lstm_sequence_forward(lstm_in, params, "lstm")
    w = params["readout.W"]
    bias = params["readout.b"]
    wcache = bcache = None
    if cfg.enable_adjuster or adjust_override is not None:
        if adjust_override is not None:
            wa, ba = adjust_override
            wa = np.broadcast_to(wa, (b,) + w.shape).astype(hbar.dtype)
            ba = np.broadcast_to(ba, (b, d)).astype(hbar.dtype)
        else:
            x = np.ascontiguousarray(adj_in.transpose(0, 2, 1))  # (B, 2N_b, K-1): row k is x_k
            wa, wcache = mlp2_forward(x, params, "wadj")
            ba3, bcache = mlp2_forward(x, params, "badj")
            ba = ba3[..., 0]
        # same memory layout as the static path so both hit the same matmul kernel
        weff = np.ascontiguousarray(wa * w)
        beff = ba * bias
    else:
        wa = ba = None
        weff = np.ascontiguousarray(np.broadcast_to(w, (b,) + w.shape))
        beff = np.broadcast_to(bias, (b, d))
    out = np.matmul(weff, z[:, :, None])[:, :, 0] + beff
    if cfg.residual:
        out = out + hbar[:, -1]
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("non-finite network output")
    return out, (z, lcache, wa, ba, weff, wcache, bcache)


def backward_real(dout: np.ndarray, cache, params: ParamStore, cfg: LpcnetConfig) -> None:
    """Accumulate gradients of the loss into ``params.grads``."""
    z, lcache, wa, ba, weff, wcache, bcache = cache
    g = params.grads
    if wa is not None:
        dweff = dout[:, :, None] * z[:, None, :]
        g["readout.W"] += np.einsum("bkj,bkj->kj", dweff, wa)
        g["readout.b"] += np.sum(dout * ba, axis=0)
        if wcache is not None:
            mlp2_backward(dweff * params["readout.W"], wcache, params, "wadj")
            mlp2_backward((dout * params["readout.b"])[..., None], bcache, params, "badj")
    else:
        g["readout.W"] += dout.T @ z
        g["readout.b"] += dout.sum(axis=0)
    dz = np.matmul(dout[:, None, :], weff)[:, 0, :]
    lstm_sequence_backward(dz, lcache, params, "lstm")


def lpcnet_forward(past: np.ndarray, params: ParamStore, cfg: LpcnetConfig, adjust_override=None) -> np.ndarray:
    """Predicted complex CSI for window(s) ``past`` of shape (K, N_b) or (B, K, N_b)."""
    past, single = _as_batch(past)
    hbar = complex_to_real(past).astype(params.dtype, copy=False)
    out, _ = forward_real(hbar, params, cfg, adjust_override)
    pred = real_to_complex(out.astype(np.float64))
    return pred[0] if single else pred


def lstm_baseline_forward(past: np.ndarray, params: ParamStore, cfg: LpcnetConfig) -> np.ndarray:
    return lpcnet_forward(past, params, config_for_kind("lstm", cfg))


def jlpcnet_forward(past: np.ndarray, params: ParamStore, cfg: LpcnetConfig) -> np.ndarray:
    """Unnormalized beamforming vector ``w_hat = conj(u)`` for the network output ``u``."""
    return np.conj(lpcnet_forward(past, params, cfg))


def predict(kind: str, past: np.ndarray, params: ParamStore, cfg: LpcnetConfig) -> np.ndarray:
    if kind == "jlpcnet":
        return jlpcnet_forward(past, params, cfg)
    return lpcnet_forward(past, params, config_for_kind(kind, cfg))
