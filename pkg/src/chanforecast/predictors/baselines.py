"""Sample-and-hold and per-antenna autoregressive predictors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import DEFAULT_CUTOFF, min_norm_lstsq_batched

AR_ORDER = 5


def sh_predict(past: np.ndarray, horizon: int = 1) -> np.ndarray:
    """Return the newest snapshot of each window, whatever the horizon.

    ``past`` is (..., K, N_b) with the newest snapshot last.
    """
    past = np.asarray(past)
    if past.shape[-2] < 1:
        raise ValueError("window is empty")
    return past[..., -1, :].copy()


@dataclass
class ArResult:
    prediction: np.ndarray
    coefficients: np.ndarray  # (..., N_b, order); a_i multiplies y_{t-i}
    fallback: np.ndarray  # (...) True where some antenna fell back to sample-and-hold


def ar_fit(series: np.ndarray, order: int = AR_ORDER, cutoff: float = DEFAULT_CUTOFF):
    """Fit ``y_t = sum_i a_i y_{t-i}`` to each series along the last axis.

    Returns (coefficients, degenerate-mask).
    """
    n = series.shape[-1]
    if n <= order:
        raise ValueError(f"need more than {order} samples, got {n}")
    rows = n - order
    idx = np.arange(rows)[:, None] + order - 1 - np.arange(order)[None, :]
    design = series[..., idx]  # (..., rows, order)
    rhs = series[..., order:]
    return min_norm_lstsq_batched(design, rhs, cutoff)


def ar_predict(past: np.ndarray, horizon: int = 1, order: int = AR_ORDER,
               cutoff: float = DEFAULT_CUTOFF) -> ArResult:
    """Fit AR(order) independently per antenna on the window and iterate ``horizon`` steps.

    Windows whose regressors are all zero, or whose forecast is not finite,
    fall back to sample-and-hold for that antenna.
    """
    past = np.asarray(past)
    k = past.shape[-2]
    if k <= order:
        raise ValueError(f"window length {k} must exceed the AR order {order}")
    series = np.swapaxes(past, -1, -2)  # (..., N_b, K)
    coef, degenerate = ar_fit(series, order, cutoff)
    hist = list(np.moveaxis(series[..., -order:], -1, 0))  # oldest..newest
    for _ in range(horizon):
        nxt = sum(coef[..., i] * hist[-1 - i] for i in range(order))
        hist.append(nxt)
    pred = hist[-1]
    bad = degenerate | ~np.isfinite(pred)
    pred = np.where(bad, series[..., -1], pred)
    return ArResult(prediction=pred, coefficients=coef, fallback=bad.any(axis=-1))
