"""Prediction and beamforming metrics."""

from __future__ import annotations

import numpy as np


def nmse(pred: np.ndarray, truth: np.ndarray) -> np.ndarray:
    """Per-sample ``||pred - truth||^2 / ||truth||^2`` over the last axis."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    den = np.sum(np.abs(truth) ** 2, axis=-1)
    if np.any(den == 0):
        raise ValueError("nmse undefined for a zero truth vector")
    return np.sum(np.abs(pred - truth) ** 2, axis=-1) / den


def mean_nmse(pred, truth) -> float:
    """Dataset aggregate: mean of the per-sample ratios."""
    return float(np.mean(nmse(pred, truth)))


def to_db(x) -> np.ndarray | float:
    return 10.0 * np.log10(x)


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``|a^H b| / (||a|| ||b||)`` over the last axis."""
    a = np.asarray(a)
    b = np.asarray(b)
    na = np.linalg.norm(a, axis=-1)
    nb = np.linalg.norm(b, axis=-1)
    if np.any(na == 0) or np.any(nb == 0):
        raise ValueError("cosine similarity undefined for a zero vector")
    return np.abs(np.sum(np.conj(a) * b, axis=-1)) / (na * nb)


def achievable_se(h: np.ndarray, w: np.ndarray, noise_var: float) -> np.ndarray:
    """``log2(1 + |h^T w|^2 / noise_var)`` in bit/s/Hz."""
    if noise_var <= 0:
        raise ValueError("noise variance must be positive")
    gain = np.abs(np.sum(np.asarray(h) * np.asarray(w), axis=-1)) ** 2
    return np.log2(1.0 + gain / noise_var)
