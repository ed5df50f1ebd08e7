"""Single-user zero-forcing beamforming."""

from __future__ import annotations

import numpy as np


def zf_beamform(h: np.ndarray, power: float = 1.0) -> np.ndarray:
    """``sqrt(P) conj(h) / ||h||`` along the last axis.

    For one user ZF collapses to the matched filter, which maximizes
    ``|h^T w|`` subject to ``w^H w <= P``.
    """
    if power <= 0:
        raise ValueError("power must be positive")
    h = np.asarray(h)
    norm = np.linalg.norm(h, axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise ValueError("cannot beamform toward a zero channel")
    return np.sqrt(power) * np.conj(h) / norm
