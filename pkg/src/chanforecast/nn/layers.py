"""LSTM and two-layer ReLU MLP with explicit forward caches and backward passes.

Weights are stored ``(out, in)``. LSTM gate blocks are ordered input, forget,
output, candidate along the ``4 * hidden`` axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .params import BIAS, WEIGHT, ParamSpec, ParamStore


def sigmoid(x: np.ndarray) -> np.ndarray:
    return expit(x)


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


@dataclass
class LstmState:
    c: np.ndarray
    z: np.ndarray

    @classmethod
    def zeros(cls, hidden: int, batch: tuple[int, ...] = (), dtype=np.float64) -> "LstmState":
        return cls(np.zeros(batch + (hidden,), dtype), np.zeros(batch + (hidden,), dtype))


def lstm_specs(prefix: str, n_in: int, hidden: int) -> list[ParamSpec]:
    return [
        ParamSpec(f"{prefix}.Wx", (4 * hidden, n_in), WEIGHT),
        ParamSpec(f"{prefix}.Wh", (4 * hidden, hidden), WEIGHT),
        ParamSpec(f"{prefix}.b", (4 * hidden,), BIAS),
    ]


def mlp2_specs(prefix: str, n_in: int, n_hidden: int, n_out: int,
               out_weight_role: str = WEIGHT, out_bias_role: str = BIAS) -> list[ParamSpec]:
    return [
        ParamSpec(f"{prefix}.W1", (n_hidden, n_in), WEIGHT),
        ParamSpec(f"{prefix}.b1", (n_hidden,), BIAS),
        ParamSpec(f"{prefix}.W2", (n_out, n_hidden), out_weight_role),
        ParamSpec(f"{prefix}.b2", (n_out,), out_bias_role),
    ]


def _check_lstm_shapes(params: ParamStore, prefix: str, n_in: int) -> int:
    wx = params[f"{prefix}.Wx"]
    four_h, d = wx.shape
    if d != n_in:
        raise ValueError(f"{prefix}: input size {n_in} does not match Wx {wx.shape}")
    if four_h % 4 or params[f"{prefix}.Wh"].shape != (four_h, four_h // 4):
        raise ValueError(f"{prefix}: inconsistent recurrent weight shape")
    return four_h // 4


def _gates(pre: np.ndarray, h: int):
    s = expit(pre[..., :3 * h])
    return s[..., :h], s[..., h:2 * h], s[..., 2 * h:], np.tanh(pre[..., 3 * h:])


def lstm_step(state: LstmState, x: np.ndarray, params: ParamStore, prefix: str = "lstm") -> LstmState:
    """One recurrence step; ``x`` may carry leading batch axes."""
    h = _check_lstm_shapes(params, prefix, x.shape[-1])
    if state.c.shape[-1] != h or state.z.shape[-1] != h:
        raise ValueError(f"state width {state.c.shape[-1]} does not match hidden size {h}")
    pre = x @ params[f"{prefix}.Wx"].T + state.z @ params[f"{prefix}.Wh"].T + params[f"{prefix}.b"]
    i, f, o, g = _gates(pre, h)
    c = f * state.c + i * g
    return LstmState(c, o * np.tanh(c))


def lstm_sequence_forward(xs: np.ndarray, params: ParamStore, prefix: str = "lstm"):
    """Run the LSTM over ``xs`` of shape (B, T, D) from a zero state.

    Returns the final hidden state (B, H) and the cache for the backward pass.
    """
    b, steps, d = xs.shape
    h = _check_lstm_shapes(params, prefix, d)
    wh = params[f"{prefix}.Wh"]
    # input projection for all steps at once
    xproj = xs @ params[f"{prefix}.Wx"].T + params[f"{prefix}.b"]
    c = np.zeros((b, h), xs.dtype)
    z = np.zeros((b, h), xs.dtype)
    gates, cs, zs = [], [c], [z]
    for t in range(steps):
        pre = xproj[:, t] + z @ wh.T
        i, f, o, g = _gates(pre, h)
        c = f * c + i * g
        z = o * np.tanh(c)
        gates.append((i, f, o, g))
        cs.append(c)
        zs.append(z)
    return z, (xs, gates, cs, zs)


def lstm_sequence_backward(dz_last: np.ndarray, cache, params: ParamStore, prefix: str = "lstm",
                           dc_last: np.ndarray | None = None) -> np.ndarray:
    """Accumulate parameter gradients into ``params.grads``; return d loss / d xs."""
    xs, gates, cs, zs = cache
    b, steps, d = xs.shape
    h = dz_last.shape[-1]
    wx = params[f"{prefix}.Wx"]
    wh = params[f"{prefix}.Wh"]
    dpre_all = np.empty((b, steps, 4 * h), xs.dtype)
    dz = dz_last
    dc = np.zeros_like(dz_last) if dc_last is None else dc_last
    for t in range(steps - 1, -1, -1):
        i, f, o, g = gates[t]
        c = cs[t + 1]
        tc = np.tanh(c)
        do = dz * tc
        dc = dc + dz * o * (1.0 - tc * tc)
        di = dc * g
        dg = dc * i
        df = dc * cs[t]
        dpre = dpre_all[:, t]
        dpre[:, :h] = di * i * (1.0 - i)
        dpre[:, h:2 * h] = df * f * (1.0 - f)
        dpre[:, 2 * h:3 * h] = do * o * (1.0 - o)
        dpre[:, 3 * h:] = dg * (1.0 - g * g)
        dc = dc * f
        dz = dpre @ wh
    flat = dpre_all.reshape(-1, 4 * h)
    params.grads[f"{prefix}.Wx"] += flat.T @ xs.reshape(-1, d)
    params.grads[f"{prefix}.Wh"] += flat.T @ np.stack(zs[:-1], axis=1).reshape(-1, h)
    params.grads[f"{prefix}.b"] += flat.sum(axis=0)
    return dpre_all @ wx


def mlp2_forward(x: np.ndarray, params: ParamStore, prefix: str):
    """``W2 relu(W1 x + b1) + b2`` over the last axis of ``x``.

    Returns the output and a cache for :func:`mlp2_backward`.
    """
    w1 = params[f"{prefix}.W1"]
    if x.shape[-1] != w1.shape[1]:
        raise ValueError(f"{prefix}: input width {x.shape[-1]} does not match W1 {w1.shape}")
    pre = x @ w1.T + params[f"{prefix}.b1"]
    hid = np.maximum(pre, 0.0)
    out = hid @ params[f"{prefix}.W2"].T + params[f"{prefix}.b2"]
    return out, (x, pre, hid)


def mlp2_backward(dout: np.ndarray, cache, params: ParamStore, prefix: str) -> np.ndarray:
    x, pre, hid = cache
    n_out = dout.shape[-1]
    n_hid = hid.shape[-1]
    d2 = dout.reshape(-1, n_out)
    params.grads[f"{prefix}.W2"] += d2.T @ hid.reshape(-1, n_hid)
    params.grads[f"{prefix}.b2"] += d2.sum(axis=0)
    dhid = (dout @ params[f"{prefix}.W2"]) * (pre > 0)
    dh2 = dhid.reshape(-1, n_hid)
    params.grads[f"{prefix}.W1"] += dh2.T @ x.reshape(-1, x.shape[-1])
    params.grads[f"{prefix}.b1"] += dh2.sum(axis=0)
    return dhid @ params[f"{prefix}.W1"]
