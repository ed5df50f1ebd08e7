"""ADAM with bias-corrected moments."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .params import ParamStore


@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def for_params(cls, params: ParamStore, **kwargs) -> "AdamState":
        st = cls(**kwargs)
        st.m = {k: np.zeros_like(v) for k, v in params.items()}
        st.v = {k: np.zeros_like(v) for k, v in params.items()}
        return st


def adam_update(params: ParamStore, grads: dict[str, np.ndarray], opt: AdamState) -> None:
    """Move ``params`` in place by one ADAM step."""
    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            raise FloatingPointError(f"non-finite gradient for {name}")
        if g.shape != params[name].shape:
            raise ValueError(f"{name}: gradient shape {g.shape} != {params[name].shape}")
    if not opt.m:
        opt.m = {k: np.zeros_like(v) for k, v in params.items()}
        opt.v = {k: np.zeros_like(v) for k, v in params.items()}
    opt.t += 1
    c1 = 1.0 - opt.beta1 ** opt.t
    c2 = 1.0 - opt.beta2 ** opt.t
    for name, g in grads.items():
        m = opt.m[name]
        v = opt.v[name]
        m *= opt.beta1
        m += (1.0 - opt.beta1) * g
        v *= opt.beta2
        v += (1.0 - opt.beta2) * (g * g)
        p = params[name]
        p -= opt.lr * (m / c1) / (np.sqrt(v / c2) + opt.eps)
