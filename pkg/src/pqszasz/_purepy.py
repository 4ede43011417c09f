"""NumPy implementations of the grid kernels, used when the extension is absent."""

import numpy as np
from scipy import ndimage


def window_modulus(values, width):
    values = np.asarray(values, dtype=float)
    best = 0.0
    for d in range(1, min(width, values.size - 1) + 1):
        best = max(best, float(np.max(np.abs(values[d:] - values[:-d]))))
    return best


def window_modulus_2d(F, w1, w2):
    F = np.asarray(F, dtype=float)
    size = (2 * w1 + 1, 2 * w2 + 1)
    hi = ndimage.maximum_filter(F, size=size, mode="constant", cval=-np.inf)
    lo = ndimage.minimum_filter(F, size=size, mode="constant", cval=np.inf)
    return float(max(np.max(hi - F), np.max(F - lo)))


def lipschitz_at(values, grid, fx, x, alpha, min_gap):
    values = np.asarray(values, dtype=float)
    gap = np.abs(np.asarray(grid, dtype=float) - x)
    keep = gap >= min_gap
    if not np.any(keep):
        return 0.0
    return float(np.max(np.abs(values[keep] - fx) / gap[keep] ** alpha))


def lipschitz_profile(values, grid, alpha, min_gap):
    values = np.asarray(values, dtype=float)
    grid = np.asarray(grid, dtype=float)
    return np.array([lipschitz_at(values, grid, values[i], grid[i], alpha, min_gap)
                     for i in range(values.size)])


def bivariate_lipschitz_at(F, g1, g2, fxy, x, y, a1, a2, min_gap):
    F = np.asarray(F, dtype=float)
    d1 = np.abs(np.asarray(g1, dtype=float) - x)
    d2 = np.abs(np.asarray(g2, dtype=float) - y)
    k1, k2 = d1 >= min_gap, d2 >= min_gap
    if not (np.any(k1) and np.any(k2)):
        return 0.0
    den = np.outer(d1[k1] ** a1, d2[k2] ** a2)
    return float(np.max(np.abs(F[np.ix_(k1, k2)] - fxy) / den))


def bivariate_lipschitz_profile(F, g1, g2, a1, a2, min_gap):
    F = np.asarray(F, dtype=float)
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    out = np.zeros(F.shape)
    for i in range(F.shape[0]):
        for j in range(F.shape[1]):
            out[i, j] = bivariate_lipschitz_at(F, g1, g2, F[i, j], g1[i], g2[j],
                                               a1, a2, min_gap)
    return out
