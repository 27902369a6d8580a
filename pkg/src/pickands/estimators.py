"""Rank-based estimators of the Pickands dependence function.

Three families are provided:

* the Pickands estimator ``1 / mean(xi_i(t))``,
* the CFG estimator ``exp(-EULER - mean(log xi_i(t)))``,
* minimum-distance estimators, the weighted least-squares fit of
  ``log C_n(y**(1-t), y**t) ~ A(t) log y`` under a weight ``h``.

Here ``xi_i(t) = min(-log u_i / (1 - t), -log v_i / t)``.  For the
minimum-distance estimator the empirical copula is floored at ``n**-gamma``
so that its logarithm stays finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .empirical import curve_breakpoints

__all__ = [
    "EULER",
    "WeightSpec",
    "DependenceCurve",
    "default_grid",
    "estimate_pickands",
    "estimate_cfg",
    "estimate_md",
    "estimate_curve",
    "pickands_integral_form",
    "cfg_integral_form",
]

EULER = 0.5772156649015329  # Euler-Mascheroni constant


def default_grid(size=101):
    return np.linspace(0.0, 1.0, size)


@dataclass(frozen=True)
class WeightSpec:
    """Weight for the minimum-distance fit.

    ``kind='hk'`` is the family ``h_k(y) = -y**k / log y`` with associated
    weight ``h*(y) = (log y)**2 h_k(y) = -y**k log y``, optionally restricted
    to ``[eps, 1 - eps]``.  ``kind='discrete'`` is a probability measure
    with atoms ``locations`` and ``masses`` in place of ``h*(y) dy / B_h``.

    Examples
    --------
    >>> WeightSpec.hk(0.4).B
    0.5102040816326532
    """

    kind: str
    k: float = 0.0
    eps: float = 0.0
    locations: tuple = field(default=())
    masses: tuple = field(default=())

    def __post_init__(self):
        if self.kind == "hk":
            if self.k < 0:
                raise ValueError("k must be nonnegative")
            if not 0 <= self.eps < 0.5:
                raise ValueError("eps must lie in [0, 1/2)")
        elif self.kind == "discrete":
            loc = np.asarray(self.locations, float)
            m = np.asarray(self.masses, float)
            if loc.shape != m.shape or loc.ndim != 1 or loc.size == 0:
                raise ValueError("locations and masses must be matching 1-d sequences")
            if np.any(m < 0) or abs(m.sum() - 1) > 1e-12:
                raise ValueError("masses must be nonnegative and sum to one")
            if np.any((loc <= 0) | (loc >= 1)):
                raise ValueError("atoms must lie in (0, 1)")
            object.__setattr__(self, "locations", tuple(loc))
            object.__setattr__(self, "masses", tuple(m))
        else:
            raise ValueError(f"unknown weight kind {self.kind!r}")

    @classmethod
    def hk(cls, k, eps=0.0):
        return cls("hk", float(k), float(eps))

    @classmethod
    def discrete(cls, locations, masses):
        return cls("discrete", locations=tuple(locations), masses=tuple(masses))

    @property
    def bounds(self):
        return (self.eps, 1.0 - self.eps)

    @staticmethod
    def _hstar_antiderivative(y, k):
        # G' = -y**k log y, G(0) = 0
        y = np.asarray(y, float)
        with np.errstate(divide="ignore", invalid="ignore"):
            ly = np.where(y > 0, np.log(np.where(y > 0, y, 1.0)), 0.0)
        p = y ** (k + 1)
        return -p * ly / (k + 1) + p / (k + 1) ** 2

    @property
    def B(self):
        """Normalising constant ``B_h``: the integral of ``h*``."""
        if self.kind == "discrete":
            return 1.0
        a, b = self.bounds
        return float(self._hstar_antiderivative(b, self.k) - self._hstar_antiderivative(a, self.k))

    def hstar(self, y):
        """Associated weight ``-y**k log y`` (zero outside the truncation window)."""
        if self.kind != "hk":
            raise ValueError("only defined for the h_k family")
        y = np.asarray(y, float)
        a, b = self.bounds
        inside = (y >= a) & (y <= b) & (y > 0) & (y < 1)
        yi = np.where(inside, y, 0.5)
        return np.where(inside, -(yi**self.k) * np.log(yi), 0.0)

    def label(self):
        if self.kind == "hk":
            s = f"h{self.k:g}"
            return s + (f"[eps={self.eps:g}]" if self.eps else "")
        return f"discrete[{len(self.locations)} atoms]"


@dataclass(frozen=True)
class DependenceCurve:
    """Values of a Pickands-type function on a grid of ``t`` in ``[0, 1]``."""

    t: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        v = np.array(self.values, dtype=float)
        if t.shape != v.shape or t.ndim != 1:
            raise ValueError("grid and values must be 1-d arrays of equal length")
        if np.any(np.diff(t) <= 0) or t[0] < 0 or t[-1] > 1:
            raise ValueError("grid must be strictly increasing inside [0, 1]")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)

    def __call__(self, t):
        return np.interp(t, self.t, self.values)

    def replace(self, values, label=None):
        return DependenceCurve(self.t, values, self.label if label is None else label)

    def ise(self, truth):
        """Integrated squared error against a callable (trapezoid rule)."""
        return float(integrate.trapezoid((self.values - truth(self.t)) ** 2, self.t))


def _xi(ps, t):
    # -log of the curve breakpoints: xi_i(t) = min(-log u_i/(1-t), -log v_i/t)
    return -np.log(curve_breakpoints(ps, t))


def estimate_pickands(ps, t):
    """Rank-based Pickands estimator ``1 / mean_i xi_i(t)``."""
    return 1.0 / _xi(ps, t).mean(axis=-1)


def estimate_cfg(ps, t):
    """Rank-based CFG estimator ``exp(-EULER - mean_i log xi_i(t))``."""
    return np.exp(-EULER - np.log(_xi(ps, t)).mean(axis=-1))


def _segments(ps, t, gamma):
    """Edges ``(T, n + 2)`` and floored log-heights ``(n + 1,)`` of the step curve."""
    z = np.sort(curve_breakpoints(ps, t), axis=-1)
    shape = z.shape[:-1] + (1,)
    edges = np.concatenate([np.zeros(shape), z, np.ones(shape)], axis=-1)
    n = ps.n
    logc = np.log(np.maximum(np.arange(n + 1) / n, float(n) ** (-gamma)))
    return edges, logc


def _power_integral(a, b, k):
    return (b ** (k + 1) - a ** (k + 1)) / (k + 1)


def estimate_md(ps, t, weight=None, gamma=0.95):
    """Minimum-distance estimator of ``A(t)``.

    For the ``h_k`` family this is ``-B_h**-1 * int log C~_n(y**(1-t), y**t) y**k dy``
    over the truncation window, where ``C~_n = max(C_n, n**-gamma)``.  The
    integrand is a step function times ``y**k`` and is integrated exactly.
    For a discrete weight it is ``sum_j m_j log C~_n(z_j**(1-t), z_j**t) / log z_j``.

    Parameters
    ----------
    ps : PseudoSample
    t : float or array_like
    weight : WeightSpec, default ``WeightSpec.hk(0.4)``
    gamma : float
        Floor exponent, must exceed 1/2.
    """
    if gamma <= 0.5:
        raise ValueError("gamma must exceed 1/2")
    weight = WeightSpec.hk(0.4) if weight is None else weight
    t = np.asarray(t, dtype=float)
    edges, logc = _segments(ps, t, gamma)
    if weight.kind == "hk":
        lo, hi = weight.bounds
        e = np.clip(edges, lo, hi)
        seg = _power_integral(e[..., :-1], e[..., 1:], weight.k)
        out = -(seg @ logc) / weight.B
    else:
        loc = np.asarray(weight.locations)
        m = np.asarray(weight.masses)
        # number of breakpoints <= each atom -> step index
        j = (edges[..., 1:-1, None] <= loc).sum(axis=-2)
        out = (m * logc[j] / np.log(loc)).sum(axis=-1)
    return out if out.ndim else float(out)


def pickands_integral_form(ps, t):
    """``1 / int_0^1 C_n(y**(1-t), y**t) / y dy`` by exact segment integration."""
    edges, _ = _segments(ps, t, 1.0)
    n = ps.n
    h = np.arange(n + 1) / n
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.log(edges[..., 1:]) - np.log(edges[..., :-1])
    logs[..., 0] = 0.0  # height 0 on the first segment
    return 1.0 / (logs @ h)


def _loglog(y):
    # antiderivative of 1 / (y log y) on (0, 1)
    with np.errstate(divide="ignore"):
        return np.log(-np.log(y))


def cfg_integral_form(ps, t):
    """CFG estimator from ``int_0^1 (C_n(y**(1-t), y**t) - 1{y > 1/e}) / (y log y) dy``.

    The integral equals ``EULER + log A``.  Each step segment is split at
    ``1/e`` and integrated exactly; above the largest breakpoint the
    integrand vanishes.
    """
    edges, _ = _segments(ps, t, 1.0)
    n = ps.n
    h = np.arange(n + 1) / n
    a, b = edges[..., :-1], edges[..., 1:]
    cut = np.exp(-1.0)
    al, bl = np.minimum(a, cut), np.minimum(b, cut)
    au, bu = np.maximum(a, cut), np.maximum(b, cut)
    below = _loglog(bl) - _loglog(al)
    below[..., 0] = 0.0  # height 0 on the first segment
    above = np.where(bu > au, _loglog(bu) - _loglog(au), 0.0)
    above[..., -1] = 0.0  # height 1 on the last segment cancels the indicator
    total = below @ h + above @ (h - 1)
    return np.exp(total - EULER)


_ESTIMATORS = ("pickands", "cfg", "md")


def estimate_curve(ps, estimator="md", t_grid=None, weight=None, gamma=0.95):
    """Evaluate a pointwise estimator on a grid of ``t``.

    Parameters
    ----------
    ps : PseudoSample
    estimator : {'pickands', 'cfg', 'md'}
    t_grid : array_like, optional
        Sorted grid containing 0 and 1; default 101 equispaced points.
    weight : WeightSpec, optional
        Weight of the minimum-distance estimator (default ``h_0.4``).
    gamma : float
    """
    t = default_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    if t[0] != 0 or t[-1] != 1:
        raise ValueError("t_grid must contain 0 and 1")
    if estimator == "pickands":
        vals, label = estimate_pickands(ps, t), "pickands"
    elif estimator == "cfg":
        vals, label = estimate_cfg(ps, t), "cfg"
    elif estimator == "md":
        weight = WeightSpec.hk(0.4) if weight is None else weight
        vals = estimate_md(ps, t, weight, gamma)
        label = f"md[{weight.label()},gamma={gamma:g}]"
    else:
        raise ValueError(f"estimator must be one of {_ESTIMATORS}")
    return DependenceCurve(t, vals, label)
