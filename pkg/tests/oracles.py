"""Independent reference implementations used as test oracles.

Written with plain loops and the ``math``/``cmath`` modules so they share no
code path with the package.
"""

import cmath
import math

import numpy as np

C = 299_792_458.0


def unit_from_angles(az, el):
    """Unit vector from azimuth and elevation; ``el`` measured from zenith."""
    return (math.sin(el) * math.cos(az), math.sin(el) * math.sin(az), math.cos(el))


def element_positions(n_col, n_row, spacing):
    """Polarization-major, row-major list of (x, y, z) element positions."""
    grid = [(0.0, c * spacing, r * spacing) for r in range(n_col) for c in range(n_row)]
    return grid + grid


def static_channel(gains, aod, aoa, delays, velocity, t, f, srs_period, n_col, n_row):
    """Literal sum over paths of the single-snapshot channel model.

    ``gains`` is a list of (alpha_+45, alpha_-45) per path, ``aod``/``aoa``
    lists of (azimuth, elevation) and ``delays`` seconds.
    """
    lam = C / f
    pos = element_positions(n_col, n_row, lam / 2)
    half = n_col * n_row
    h = []
    for b, d in enumerate(pos):
        pol = 0 if b < half else 1
        acc = 0j
        for l in range(len(gains)):
            rtx = unit_from_angles(*aod[l])
            rrx = unit_from_angles(*aoa[l])
            steer = cmath.exp(2j * math.pi * sum(rtx[i] * d[i] for i in range(3)) / lam)
            dop = cmath.exp(2j * math.pi * sum(rrx[i] * velocity[i] for i in range(3)) / lam * (t * srs_period))
            delay = cmath.exp(-2j * math.pi * f * delays[l])
            acc += gains[l][pol] * steer * delay * dop
        h.append(acc)
    return np.array(h)


def ar_forecast(series, order, horizon):
    """Per-series AR fit through numpy's pseudo-inverse, then recursion."""
    series = list(series)
    rows = [[series[t - 1 - i] for i in range(order)] for t in range(order, len(series))]
    coef = np.linalg.pinv(np.array(rows)) @ np.array(series[order:])
    hist = series[:]
    for _ in range(horizon):
        hist.append(sum(coef[i] * hist[-1 - i] for i in range(order)))
    return hist[-1]
