"""Dense linear-algebra helpers, RNG contract and the gradient oracle."""

from __future__ import annotations

from typing import Callable

import numpy as np

DEFAULT_CUTOFF = 1e-10


def complex_to_real(h: np.ndarray) -> np.ndarray:
    """Split complex vectors into ``[real | imag]`` along the last axis.

    Works on any leading batch shape; the output's last axis is twice as long.
    """
    h = np.asarray(h)
    return np.concatenate([h.real, h.imag], axis=-1)


def real_to_complex(x: np.ndarray) -> np.ndarray:
    """Inverse of :func:`complex_to_real`."""
    x = np.asarray(x)
    n = x.shape[-1]
    if n % 2:
        raise ValueError(f"real layout needs an even length, got {n}")
    half = n // 2
    return x[..., :half] + 1j * x[..., half:]


def min_norm_lstsq(A: np.ndarray, y: np.ndarray, cutoff: float = DEFAULT_CUTOFF) -> np.ndarray:
    """Minimum-norm least-squares solution of ``A x = y`` via the SVD.

    Singular values below ``cutoff * sigma_max`` are treated as zero, so
    rank-deficient systems (constant or all-zero windows) stay well posed.
    """
    A = np.atleast_2d(np.asarray(A))
    y = np.asarray(y)
    if not 0.0 < cutoff < 1.0:
        raise ValueError("cutoff must lie in (0, 1)")
    if A.shape[0] != y.shape[0]:
        raise ValueError(f"dimension mismatch: A is {A.shape}, y has {y.shape[0]} rows")
    u, s, vh = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros(A.shape[1], dtype=np.result_type(A, y))
    keep = s > cutoff * s[0]
    coef = (u[:, keep].conj().T @ y) / s[keep]
    return vh[keep].conj().T @ coef


def finite_diff_grad(
    f: Callable[[np.ndarray], float], params: np.ndarray, eps: float | np.ndarray = 1e-6
) -> np.ndarray:
    """Central-difference gradient of a scalar function.

    ``eps`` may be a scalar or a per-entry array of step sizes.
    """
    p = np.array(params, dtype=np.float64)
    steps = np.broadcast_to(np.asarray(eps, dtype=np.float64), p.shape)
    if np.any(steps <= 0):
        raise ValueError("eps must be positive")
    grad = np.empty_like(p)
    flat = p.reshape(-1)
    g = grad.reshape(-1)
    st = steps.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + st[i]
        fp = f(p)
        flat[i] = orig - st[i]
        fm = f(p)
        flat[i] = orig
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise FloatingPointError(f"non-finite function value at entry {i}")
        g[i] = (fp - fm) / (2.0 * st[i])
    return grad


def relative_scale_eps(params: np.ndarray, base: float = 1e-6) -> np.ndarray:
    """Step sizes ``base * max(1, |p|)`` used by the gradient checks."""
    return base * np.maximum(1.0, np.abs(params))


def max_relative_error(a: np.ndarray, b: np.ndarray, floor: float = 1e-8) -> float:
    """Largest entrywise ``|a-b| / max(|a|, |b|, floor)``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)
    return float(np.max(np.abs(a - b) / denom)) if a.size else 0.0


def make_rng(seed: int, index: int | None = None) -> np.random.Generator:
    """Seeded generator; ``index`` spawns an independent child stream.

    Children are addressed by index, so stream ``i`` is the same whether it
    is built serially or inside a worker.
    """
    if index is None:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    ss = np.random.SeedSequence(seed, spawn_key=(int(index),))
    return np.random.Generator(np.random.PCG64(ss))


def min_norm_lstsq_batched(A: np.ndarray, y: np.ndarray, cutoff: float = DEFAULT_CUTOFF):
    """Stacked version of :func:`min_norm_lstsq` over leading axes.

    Returns the solutions and a mask of systems whose design matrix was all zero.
    """
    u, s, vh = np.linalg.svd(A, full_matrices=False)
    smax = s[..., :1]
    keep = (s > cutoff * smax) & (smax > 0)
    inv = np.where(keep, 1.0 / np.where(keep, s, 1.0), 0.0)
    coef = np.einsum("...mk,...m->...k", u.conj(), y) * inv
    x = np.einsum("...kn,...k->...n", vh.conj(), coef)
    return x, smax[..., 0] == 0
