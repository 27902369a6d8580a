"""Rank transforms, the empirical copula and multiplier replicates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

__all__ = [
    "PseudoSample",
    "CurveStep",
    "pseudo_observations",
    "empirical_copula",
    "curve_steps",
    "curve_breakpoints",
    "partial_derivative_estimate",
    "multiplier_influence",
    "multiplier_replicate",
    "multiplier_weights",
    "read_sample",
    "write_pseudo",
]


@dataclass(frozen=True)
class PseudoSample:
    """Rank-transformed bivariate sample with coordinates in ``(0, 1)``.

    Attributes
    ----------
    u, v : ndarray
        ``rank / (n + 1)`` of the two coordinates.
    ties : str
        How ties in the raw data were ranked.
    """

    u: np.ndarray
    v: np.ndarray
    ties: str = "average"

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if u.shape != v.shape or u.ndim != 1:
            raise ValueError("u and v must be one-dimensional and of equal length")
        if u.size < 2:
            raise ValueError("at least two observations are required")
        if np.any((u <= 0) | (u >= 1) | (v <= 0) | (v >= 1)):
            raise ValueError("pseudo-observations must lie strictly inside (0, 1)")
        u.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def n(self):
        return self.u.size

    @classmethod
    def from_uniform(cls, uv):
        """Rank-transform an ``(n, 2)`` array (e.g. a copula sample)."""
        uv = np.asarray(uv, dtype=float)
        return pseudo_observations(uv[:, 0], uv[:, 1])


def pseudo_observations(x, y=None, ties="average"):
    """Rescaled ranks ``rank / (n + 1)`` of each coordinate.

    Parameters
    ----------
    x : array_like
        First coordinate, or an ``(n, 2)`` array when ``y`` is omitted.
    y : array_like, optional
    ties : str
        Any ``method`` accepted by :func:`scipy.stats.rankdata`.

    Examples
    --------
    >>> ps = pseudo_observations([1.0, 2.0], [5.0, 3.0])
    >>> ps.u, ps.v
    (array([0.33333333, 0.66666667]), array([0.66666667, 0.33333333]))
    """
    if y is None:
        xy = np.asarray(x, dtype=float)
        x, y = xy[:, 0], xy[:, 1]
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.isnan(x).any() or np.isnan(y).any():
        raise ValueError("sample contains NaN")
    n = x.size
    return PseudoSample(rankdata(x, method=ties) / (n + 1), rankdata(y, method=ties) / (n + 1), ties)


def _count_below(ps, u, v, weights=None):
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    ind = (ps.u[:, None] <= u.ravel()) & (ps.v[:, None] <= v.ravel())
    if weights is None:
        out = ind.mean(axis=0)
    else:
        out = weights @ ind / ps.n
    return out.reshape(u.shape)


def empirical_copula(ps, u, v):
    """``#{i : u_i <= u, v_i <= v} / n`` (vectorised over ``u``, ``v``)."""
    c = _count_below(ps, u, v)
    return c if c.ndim else float(c)


def curve_breakpoints(ps, t):
    """Points ``max(u_i**(1/(1-t)), v_i**(1/t))`` for each observation.

    ``t`` may be an array; the result then has shape ``t.shape + (n,)``.
    At ``t = 0`` (``t = 1``) the breakpoints are ``u_i`` (``v_i``).
    """
    t = np.asarray(t, dtype=float)[..., None]
    with np.errstate(divide="ignore"):
        a = np.where(t < 1, np.log(ps.u) / np.where(t < 1, 1 - t, 1.0), -np.inf)
        b = np.where(t > 0, np.log(ps.v) / np.where(t > 0, t, 1.0), -np.inf)
    return np.exp(np.maximum(a, b))


@dataclass(frozen=True)
class CurveStep:
    """``y -> max(C_n(y**(1-t), y**t), floor)`` as a right-continuous step function.

    Attributes
    ----------
    t : float
    breakpoints : ndarray
        Sorted jump locations; the value on ``[z_(j), z_(j+1))`` is ``j/n``.
    floor : float
    """

    t: float
    breakpoints: np.ndarray
    floor: float

    @property
    def n(self):
        return self.breakpoints.size

    def heights(self):
        """Floored step heights on the ``n + 1`` segments ``[z_(j), z_(j+1))``."""
        return np.maximum(np.arange(self.n + 1) / self.n, self.floor)

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        j = np.searchsorted(self.breakpoints, y, side="right")
        out = np.maximum(j / self.n, self.floor)
        return out if out.ndim else float(out)


def curve_steps(ps, t, gamma=0.95):
    """Step representation of the floored empirical copula along ``(y**(1-t), y**t)``."""
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    if gamma <= 0.5:
        raise ValueError("gamma must exceed 1/2")
    z = np.sort(curve_breakpoints(ps, t))
    z.setflags(write=False)
    return CurveStep(float(t), z, ps.n ** (-gamma))


def _interval(x, h):
    lo = np.maximum(x - h, 0.0)
    hi = np.minimum(x + h, 1.0)
    return lo, hi


def partial_derivative_estimate(ps, which, u, v, h=None):
    """Finite-difference estimate of a partial derivative of the copula.

    Central difference of the empirical copula with bandwidth
    ``h = n**-0.5``.  Near the boundary the difference interval is cut back
    to ``[0, 1]`` and divided by its actual length.  Values are clipped to
    ``[0, 1]``.
    """
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    h = ps.n ** -0.5 if h is None else h
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    if which == 1:
        lo, hi = _interval(u, h)
        d = (_count_below(ps, hi, v) - _count_below(ps, lo, v)) / (hi - lo)
    else:
        lo, hi = _interval(v, h)
        d = (_count_below(ps, u, hi) - _count_below(ps, u, lo)) / (hi - lo)
    d = np.clip(d, 0.0, 1.0)
    return d if d.ndim else float(d)


def multiplier_weights(xi):
    """Normalised multipliers ``xi / mean(xi)``."""
    xi = np.asarray(xi, dtype=float)
    m = xi.mean(axis=-1, keepdims=True)
    if np.any(m <= 0):
        raise ValueError("multipliers must have positive mean")
    return xi / m


def multiplier_influence(ps, u, v, h=None):
    """Per-observation terms whose multiplier-weighted sum is the replicate.

    Returns ``D`` of shape ``(n,) + u.shape`` with::

        D_i(u, v) = 1{u_i<=u, v_i<=v} - d1(u, v) 1{u_i<=u} - d2(u, v) 1{v_i<=v}

    where ``d1``, ``d2`` are the estimated partial derivatives.  For
    normalised weights ``w`` summing to ``n``,
    ``sum_i (w_i - 1) D_i / sqrt(n)`` is the multiplier replicate.
    """
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    d1 = partial_derivative_estimate(ps, 1, u, v, h)
    d2 = partial_derivative_estimate(ps, 2, u, v, h)
    iu = ps.u.reshape((-1,) + (1,) * u.ndim) <= u
    iv = ps.v.reshape((-1,) + (1,) * u.ndim) <= v
    return (iu & iv) - d1 * iu - d2 * iv


def multiplier_replicate(ps, xi, u, v, h=None):
    """Multiplier-bootstrap replicate of the empirical copula process.

    ``beta(u, v) - d1(u, v) beta(u, 1) - d2(u, v) beta(1, v)`` with
    ``beta = sqrt(n) (C*_n - C_n)``, where ``C*_n`` reweights observation
    ``i`` by ``xi_i / mean(xi)``.

    Parameters
    ----------
    ps : PseudoSample
    xi : array_like of shape (n,)
        Multipliers, e.g. drawn from ``{0, 2}`` with equal probability.
    u, v : array_like
    """
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (ps.n,):
        raise ValueError("need one multiplier per observation")
    w = multiplier_weights(xi)
    D = multiplier_influence(ps, u, v, h)
    out = np.tensordot(w - 1, D, axes=1) / np.sqrt(ps.n)
    return out if out.ndim else float(out)


def read_sample(path):
    """Two-column CSV (x, y) with an optional header line."""
    with open(path) as fh:
        first = fh.readline()
    try:
        [float(s) for s in first.replace(";", ",").split(",")[:2]]
        skip = 0
    except ValueError:
        skip = 1
    data = np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2, usecols=(0, 1))
    return data


def write_pseudo(ps, path):
    np.savetxt(path, np.column_stack([ps.u, ps.v]), delimiter=",", header="u,v", comments="")
