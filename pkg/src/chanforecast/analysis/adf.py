"""Augmented Dickey-Fuller test (constant, no trend) and segment-wise p-value CDFs.

The regression is fitted here; p-values come from MacKinnon's response
surface as shipped in statsmodels. :func:`simulate_df_distribution` gives an
independent Monte Carlo view of the null distribution for validating that map.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from statsmodels.tsa.adfvalues import mackinnonp


@dataclass(frozen=True)
class AdfResult:
    statistic: float
    pvalue: float
    lags: int
    nobs: int


def schwert_lags(n: int) -> int:
    return int(np.floor(12.0 * (n / 100.0) ** 0.25))


def _design(y: np.ndarray, lags: int) -> tuple[np.ndarray, np.ndarray]:
    """Columns: constant, y_{t-1}, dy_{t-1} .. dy_{t-lags}; rows t = lags+1 .. n-1."""
    dy = np.diff(y, axis=-1)
    m = dy.shape[-1] - lags
    cols = [np.ones(y.shape[:-1] + (m,)), y[..., lags:-1]]
    for i in range(1, lags + 1):
        cols.append(dy[..., lags - i:lags - i + m])
    return np.stack(cols, axis=-1), dy[..., lags:]


def pvalue(statistic: float) -> float:
    """MacKinnon p-value, constant-only case, one series."""
    return float(mackinnonp(statistic, regression="c", N=1))


def adf_test(series, lags: int | str = 1) -> AdfResult:
    """OLS ``dy_t = a + g y_{t-1} + sum_i b_i dy_{t-i}``; t-statistic of ``g``."""
    y = np.asarray(series, dtype=np.float64)
    if y.ndim != 1:
        raise ValueError("adf_test expects a one-dimensional series")
    if lags == "schwert":
        lags = schwert_lags(y.size)
    lags = int(lags)
    if lags < 0:
        raise ValueError("lag order must be >= 0")
    if y.size < lags + 10:
        raise ValueError(f"series of length {y.size} is too short for {lags} lags")
    X, target = _design(y, lags)
    m, k = X.shape
    coef, _, rank, sv = np.linalg.lstsq(X, target, rcond=None)
    if rank < k or sv[-1] <= 1e-12 * sv[0]:
        raise np.linalg.LinAlgError("singular ADF regression matrix")
    resid = target - X @ coef
    sigma2 = resid @ resid / (m - k)
    cov = sigma2 * np.linalg.inv(X.T @ X)
    stat = float(coef[1] / np.sqrt(cov[1, 1]))
    return AdfResult(statistic=stat, pvalue=pvalue(stat), lags=lags, nobs=m)


def df_statistics(y: np.ndarray, lags: int = 1) -> np.ndarray:
    """Vectorized ADF t-statistics for a stack of series (R, n)."""
    X, target = _design(np.asarray(y, dtype=np.float64), lags)
    m, k = X.shape[-2:]
    xtx = np.einsum("rmi,rmj->rij", X, X)
    xty = np.einsum("rmi,rm->ri", X, target)
    inv = np.linalg.inv(xtx)
    coef = np.einsum("rij,rj->ri", inv, xty)
    resid = target - np.einsum("rmi,ri->rm", X, coef)
    sigma2 = np.sum(resid * resid, axis=-1) / (m - k)
    return coef[:, 1] / np.sqrt(sigma2 * inv[:, 1, 1])


def simulate_df_distribution(n: int, lags: int = 1, reps: int = 100_000, seed: int = 0,
                             chunk: int = 2000) -> np.ndarray:
    """ADF t-statistics of ``reps`` Gaussian random walks of length ``n`` (the unit-root null)."""
    rng = np.random.default_rng(seed)
    out = []
    for s in range(0, reps, chunk):
        r = min(chunk, reps - s)
        walks = np.cumsum(rng.standard_normal((r, n)), axis=1)
        out.append(df_statistics(walks, lags))
    return np.concatenate(out)


@dataclass(frozen=True)
class SegmentPvalue:
    trajectory: int
    segment: int
    start: int
    statistic: float
    pvalue: float


def segment_pvalues(snapshots: np.ndarray, segment_len: int, stride: int, lags: int | str = 1,
                    antenna: int = 0) -> list[SegmentPvalue]:
    """ADF over sliding segments of the real part of one antenna's CSI.

    ``snapshots`` is (n_traj, T, N_b) complex; results come back in
    (trajectory, segment) order.
    """
    snapshots = np.asarray(snapshots)
    if snapshots.ndim == 2:
        snapshots = snapshots[None]
    t = snapshots.shape[1]
    if segment_len > t:
        raise ValueError(f"segment length {segment_len} exceeds trajectory length {t}")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    rows = []
    for ti in range(snapshots.shape[0]):
        series = snapshots[ti, :, antenna].real
        for si, start in enumerate(range(0, t - segment_len + 1, stride)):
            res = adf_test(series[start:start + segment_len], lags)
            rows.append(SegmentPvalue(ti, si, start, res.statistic, res.pvalue))
    return rows


def pvalue_cdf(snapshots: np.ndarray, segment_len: int, stride: int, lags: int | str = 1,
               antenna: int = 0) -> np.ndarray:
    """Sorted segment p-values, ready for an empirical CDF plot."""
    return np.sort([r.pvalue for r in segment_pvalues(snapshots, segment_len, stride, lags, antenna)])
