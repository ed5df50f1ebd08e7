"""Mini-batch ADAM training for the neural predictors."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..channel.dataset import WindowBatch
from ..nn.adam import AdamState, adam_update
from ..nn.params import ParamStore
from ..numerics import complex_to_real, make_rng
from .beamforming import zf_beamform
from .losses import cosine_loss, nmse_loss
from .lpcnet import NEURAL_KINDS, LpcnetConfig, backward_real, config_for_kind, forward_real, init_model

log = logging.getLogger(__name__)

EVAL_CHUNK = 1024


class TrainingError(FloatingPointError):
    """Raised when the loss or gradients stop being finite."""


@dataclass
class TrainResult:
    kind: str
    cfg: LpcnetConfig
    params: ParamStore
    loss_curve: list[float] = field(default_factory=list)
    final_loss: float = float("nan")


def _conj_layout(x: np.ndarray) -> np.ndarray:
    half = x.shape[-1] // 2
    return np.concatenate([x[..., :half], -x[..., half:]], axis=-1)


def prepare(kind: str, windows: WindowBatch, dtype=np.float64) -> tuple[np.ndarray, np.ndarray]:
    """Real-layout inputs and labels; JLPCNet labels are ZF beams of the true CSI."""
    hbar = complex_to_real(windows.past).astype(dtype)
    if kind == "jlpcnet":
        target = complex_to_real(zf_beamform(windows.target)).astype(dtype)
    else:
        target = complex_to_real(windows.target).astype(dtype)
    return hbar, target


def loss_and_grad(kind: str, out: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    if kind == "jlpcnet":
        value, grad = cosine_loss(_conj_layout(out), target)
        return value, _conj_layout(grad)
    return nmse_loss(out, target)


def per_sample_loss(kind: str, out: np.ndarray, target: np.ndarray) -> np.ndarray:
    if kind == "jlpcnet":
        from .losses import per_sample_cosine
        return -per_sample_cosine(_conj_layout(out), target)
    diff = out - target
    return np.sum(diff * diff, axis=-1) / np.sum(target * target, axis=-1)


def evaluate_loss(kind: str, params: ParamStore, cfg: LpcnetConfig, windows: WindowBatch) -> float:
    """Loss of the whole window set in evaluation mode (no parameter updates)."""
    net_cfg = config_for_kind(kind, cfg)
    hbar, target = prepare(kind, windows, params.dtype)
    losses = []
    for s in range(0, hbar.shape[0], EVAL_CHUNK):
        out, _ = forward_real(hbar[s:s + EVAL_CHUNK], params, net_cfg)
        losses.append(per_sample_loss(kind, out.astype(np.float64), target[s:s + EVAL_CHUNK].astype(np.float64)))
    return float(np.mean(np.concatenate(losses)))


def train(kind: str, windows: WindowBatch, cfg: LpcnetConfig, seed: int = 0, dtype=np.float64,
          params: ParamStore | None = None, progress=None) -> TrainResult:
    """Train one model on ``windows`` with shuffled mini-batches.

    Initialization uses stream 0 of ``seed`` and shuffling stream 1, so a
    run is fully determined by ``seed``. ``progress(epoch, loss)`` is called
    after every epoch when given.
    """
    if kind not in NEURAL_KINDS:
        raise ValueError(f"{kind!r} is not a trainable model")
    if len(windows) == 0:
        raise ValueError("empty training set")
    net_cfg = config_for_kind(kind, cfg)
    if params is None:
        params = init_model(net_cfg, make_rng(seed, 0), dtype)
    opt = AdamState.for_params(params, lr=cfg.lr)
    shuffle = make_rng(seed, 1)
    hbar, target = prepare(kind, windows, params.dtype)
    n = hbar.shape[0]
    curve = []
    for epoch in range(cfg.epochs):
        order = shuffle.permutation(n)
        total = 0.0
        for bi, s in enumerate(range(0, n, cfg.batch_size)):
            idx = np.sort(order[s:s + cfg.batch_size])
            xb, yb = hbar[idx], target[idx]
            params.zero_grad()
            try:
                out, cache = forward_real(xb, params, net_cfg)
                value, dout = loss_and_grad(kind, out, yb)
                if not np.isfinite(value):
                    raise FloatingPointError("non-finite loss")
                backward_real(dout, cache, params, net_cfg)
                adam_update(params, params.grads, opt)
            except FloatingPointError as exc:
                raise TrainingError(
                    f"{kind}: {exc} at epoch {epoch}, batch {bi}, parameter norm {params.norm():.4g}"
                ) from exc
            total += value * idx.size
        curve.append(total / n)
        if progress is not None:
            progress(epoch, curve[-1])
        log.debug("%s epoch %d loss %.6g", kind, epoch, curve[-1])
    final = evaluate_loss(kind, params, cfg, windows)
    return TrainResult(kind=kind, cfg=cfg, params=params, loss_curve=curve, final_loss=final)
