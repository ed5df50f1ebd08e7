"""Training losses on real-layout vectors, each returning (value, gradient)."""

from __future__ import annotations

import numpy as np

_TINY = 1e-300


def nmse_loss(pred: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean over samples of ``||pred - target||^2 / ||target||^2``."""
    diff = pred - target
    den = np.sum(target * target, axis=-1, keepdims=True)
    if np.any(den == 0):
        raise ValueError("zero target vector in NMSE loss")
    per = np.sum(diff * diff, axis=-1, keepdims=True) / den
    n = pred.shape[0]
    return float(np.mean(per)), (2.0 / n) * diff / den


def per_sample_cosine(pred: np.ndarray, target: np.ndarray) -> np.ndarray:
    half = pred.shape[-1] // 2
    a, b = pred[..., :half], pred[..., half:]
    c, d = target[..., :half], target[..., half:]
    p = np.sum(a * c + b * d, axis=-1)
    q = np.sum(a * d - b * c, axis=-1)
    nx = np.sqrt(np.sum(pred * pred, axis=-1))
    ny = np.sqrt(np.sum(target * target, axis=-1))
    return np.hypot(p, q) / (nx * ny)


def cosine_loss(pred: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    """Negative mean of ``|x^H y| / (||x|| ||y||)`` with x, y given as [re | im]."""
    half = pred.shape[-1] // 2
    a, b = pred[..., :half], pred[..., half:]
    c, d = target[..., :half], target[..., half:]
    p = np.sum(a * c + b * d, axis=-1, keepdims=True)
    q = np.sum(a * d - b * c, axis=-1, keepdims=True)
    m = np.maximum(np.hypot(p, q), _TINY)
    nx2 = np.sum(pred * pred, axis=-1, keepdims=True)
    if np.any(nx2 == 0):
        raise ValueError("zero beamforming vector has no direction")
    nx = np.sqrt(nx2)
    ny = np.sqrt(np.sum(target * target, axis=-1, keepdims=True))
    rho = m / (nx * ny)
    scale = 1.0 / (m * nx * ny)
    da = (p * c + q * d) * scale - rho * a / nx2
    db = (p * d - q * c) * scale - rho * b / nx2
    n = pred.shape[0]
    return -float(np.mean(rho)), -np.concatenate([da, db], axis=-1) / n
