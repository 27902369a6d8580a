"""Shape corrections turning an estimate into a valid Pickands function.

A Pickands function is convex with ``max(t, 1-t) <= A(t) <= 1``.  The
corrections here act on curves sampled on a grid, and between grid points a
curve is read as the linear interpolant.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "clamp_bounds",
    "greatest_convex_minorant",
    "full_correction",
    "endpoint_correct_pickands",
    "endpoint_correct_cfg",
    "lower_hull",
]


def clamp_bounds(curve):
    """Pointwise ``max(t, 1 - t, min(A, 1))``."""
    t = curve.t
    vals = np.maximum(np.maximum(t, 1 - t), np.minimum(curve.values, 1.0))
    return curve.replace(vals)


def lower_hull(x, y):
    """Indices of the lower convex hull vertices of points sorted by ``x``.

    Andrew's monotone chain.  Collinear points are dropped, so for equal
    slopes only the outer vertices are kept.
    """
    hull = []
    for i in range(len(x)):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a])
            if cross <= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.array(hull)


def greatest_convex_minorant(curve):
    """Lower convex hull of the grid points, evaluated back on the grid."""
    idx = lower_hull(curve.t, curve.values)
    vals = np.interp(curve.t, curve.t[idx], curve.values[idx])
    # hull vertices are data points; keep them bit-exact
    vals[idx] = curve.values[idx]
    return curve.replace(np.minimum(vals, curve.values))


def full_correction(curve):
    """``clamp_bounds`` followed by ``greatest_convex_minorant``."""
    return greatest_convex_minorant(clamp_bounds(curve))


def endpoint_correct_pickands(curve):
    """Pickands endpoint correction: make ``1/A`` equal 1 at both ends.

    ``1/A_c(t) = 1/A(t) - (1 - t)(1/A(0) - 1) - t (1/A(1) - 1)``.
    Requires a grid containing 0 and 1.
    """
    t, a = curve.t, curve.values
    inv = 1 / a - (1 - t) * (1 / a[0] - 1) - t * (1 / a[-1] - 1)
    return curve.replace(1 / inv)


def endpoint_correct_cfg(curve):
    """CFG endpoint correction on the log scale.

    ``log A_c(t) = log A(t) - (1 - t) log A(0) - t log A(1)``.
    """
    t, a = curve.t, curve.values
    return curve.replace(np.exp(np.log(a) - (1 - t) * np.log(a[0]) - t * np.log(a[-1])))

