"""Test of extreme-value dependence.

The statistic is ``n M_h(C~_n, A_hat)``: ``n`` times the minimal weighted
L2 distance between ``log C~_n(y**(1-t), y**t)`` and its best fit
``A(t) log y``.  It vanishes in the limit exactly for extreme-value copulas.
Its null distribution is approximated by a multiplier bootstrap of the
empirical copula process.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import special
from scipy.special import roots_legendre

from . import _rng
from .approximation import cov_gaussian_field, best_approx, min_distance
from .empirical import curve_breakpoints, multiplier_influence, multiplier_weights, pseudo_observations
from .estimators import WeightSpec, _segments

__all__ = [
    "TestConfig",
    "TestReport",
    "test_statistic",
    "BootstrapKernel",
    "bootstrap_replicate",
    "draw_multipliers",
    "run_test",
    "PowerApproximation",
    "power_approximation",
]


@dataclass(frozen=True)
class TestConfig:
    """Settings of the extreme-value dependence test.

    Parameters
    ----------
    k : float
        Exponent of the weight ``h_k``.
    eps : float
        The associated weight is restricted to ``[eps, 1 - eps]``.
    gamma : float
        Floor exponent of ``C~_n = max(C_n, n**-gamma)``.
    t_points : int
        Size of the equispaced ``t`` grid (trapezoid rule).
    y_points : int
        Extra equispaced ``y`` nodes added to the bootstrap cells.
    B : int
        Number of bootstrap replicates.
    alpha : float
    seed : int
    decision : {'pvalue', 'quantile'}
        Reject if ``p <= alpha`` or if the statistic exceeds the empirical
        ``1 - alpha`` quantile of the replicates.
    """

    __test__ = False  # not a pytest class

    k: float = 0.4
    eps: float = 0.02
    gamma: float = 0.95
    t_points: int = 101
    y_points: int = 64
    B: int = 200
    alpha: float = 0.05
    seed: int = 0
    decision: str = "pvalue"

    def __post_init__(self):
        if self.gamma <= 0.5:
            raise ValueError("gamma must exceed 1/2")
        if not 0 < self.eps < 0.5:
            raise ValueError("eps must lie in (0, 1/2)")
        if self.B < 1:
            raise ValueError("B must be positive")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.t_points < 2:
            raise ValueError("t_points must be at least 2")
        if self.decision not in ("pvalue", "quantile"):
            raise ValueError("decision must be 'pvalue' or 'quantile'")

    @property
    def weight(self):
        return WeightSpec.hk(self.k, self.eps)

    @property
    def t_grid(self):
        return np.linspace(0.0, 1.0, self.t_points)


@dataclass
class TestReport:
    """Outcome of :func:`run_test`."""

    __test__ = False

    statistic: float
    replicates: np.ndarray
    p_value: float
    critical_value: float
    reject: bool
    n: int
    config: TestConfig
    clamped: int = 0
    seconds: float = 0.0
    key: tuple = field(default=())

    def to_dict(self, with_replicates=True):
        d = {
            "statistic": self.statistic,
            "p_value": self.p_value,
            "critical_value": self.critical_value,
            "reject": self.reject,
            "n": self.n,
            "clamped": self.clamped,
            "seconds": self.seconds,
            "config": asdict(self.config),
        }
        if with_replicates:
            d["replicates"] = [float(r) for r in self.replicates]
        return d

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def _e1_segment(a, b, k):
    """``int_a^b y**k / (-log y) dy`` for ``0 < a <= b < 1`` via the exponential integral."""
    with np.errstate(divide="ignore", invalid="ignore"):
        out = special.exp1(-(k + 1) * np.log(b)) - special.exp1(-(k + 1) * np.log(a))
    return np.where(b > a, out, 0.0)


def _pow_segment(a, b, k):
    return (b ** (k + 1) - a ** (k + 1)) / (k + 1)


def _trapezoid_weights(t):
    w = np.zeros_like(t)
    d = np.diff(t)
    w[:-1] += d / 2
    w[1:] += d / 2
    return w


def distance_profile(ps, cfg):
    """Per-``t`` minimal distance ``int (r - A_hat)**2 h* dy`` of the floored empirical copula.

    With ``I1 = int -log C~ y**k dy`` and ``I2 = int (log C~)**2 y**k / (-log y) dy``
    over ``[eps, 1 - eps]`` this is ``I2 - I1**2 / B_h``; both integrals are
    exact on the step segments.
    """
    t = cfg.t_grid
    edges, logc = _segments(ps, t, cfg.gamma)
    lo, hi = cfg.weight.bounds
    e = np.clip(edges, lo, hi)
    a, b = e[:, :-1], e[:, 1:]
    i1 = -(_pow_segment(a, b, cfg.k) @ logc)
    i2 = _e1_segment(a, b, cfg.k) @ logc**2
    return t, i2 - i1**2 / cfg.weight.B


def test_statistic(ps, cfg=None):
    """``n M_h(C~_n, A_hat)`` with the ``t``-integral by the trapezoid rule."""
    cfg = TestConfig() if cfg is None else cfg
    t, m = distance_profile(ps, cfg)
    return max(ps.n * float(_trapezoid_weights(t) @ m), 0.0)


class BootstrapKernel:
    """Quadratic form giving multiplier-bootstrap replicates of the statistic.

    For normalised multipliers ``w`` the replicate is
    ``Z* = int [int (a/C~)**2 h*/(log y)**2 dy - B_h**-1 (int (a/C~) h*/log y dy)**2] dt``
    with ``a = n**-1/2 sum_i (w_i - 1) D_i`` the multiplier process.
    Being quadratic in ``w - 1``, ``Z* = (w - 1)' M (w - 1) / n`` with an
    ``n x n`` matrix ``M`` that is assembled once per sample.

    In ``y`` the process is evaluated at the midpoints of cells bounded by
    the jump points ``u_i**(1/(1-t))`` and ``v_i**(1/t)`` of the indicators
    and by ``y_points`` equispaced nodes; the weight is integrated exactly
    over each cell.
    """

    def __init__(self, ps, cfg=None):
        cfg = TestConfig() if cfg is None else cfg
        self.ps = ps
        self.cfg = cfg
        n = ps.n
        k = cfg.k
        lo, hi = cfg.weight.bounds
        Bh = cfg.weight.B
        t = cfg.t_grid
        wt = _trapezoid_weights(t)
        fixed = np.linspace(lo, hi, cfg.y_points)
        floor = n ** (-cfg.gamma)
        M = np.zeros((n, n))
        for tj, wj in zip(t, wt):
            if wj == 0:
                continue
            with np.errstate(divide="ignore"):
                jumps = np.concatenate([
                    ps.u ** (1 / (1 - tj)) if tj < 1 else np.empty(0),
                    ps.v ** (1 / tj) if tj > 0 else np.empty(0),
                ])
            jumps = jumps[(jumps > lo) & (jumps < hi)]
            e = np.unique(np.concatenate([fixed, jumps]))
            a, b = e[:-1], e[1:]
            y = 0.5 * (a + b)
            u, v = y ** (1 - tj), y**tj
            D = multiplier_influence(ps, u, v)
            z = curve_breakpoints(ps, tj)
            ct = np.maximum((z[:, None] <= y).mean(axis=0), floor)
            D = D / ct
            wa = _e1_segment(a, b, k)
            g = D @ _pow_segment(a, b, k)
            M += wj * ((D * wa) @ D.T - np.outer(g, g) / Bh)
        self.M = 0.5 * (M + M.T)

    def replicate(self, xi):
        """Replicate(s) for multipliers ``xi`` of shape ``(n,)`` or ``(B, n)``."""
        w = multiplier_weights(xi) - 1.0
        q = np.einsum("...i,ij,...j->...", w, self.M, w) / self.ps.n
        return q


def bootstrap_replicate(ps, cfg, xi):
    """A single multiplier-bootstrap replicate of the statistic."""
    xi = np.asarray(xi, float)
    if xi.shape != (ps.n,):
        raise ValueError("need one multiplier per observation")
    return max(float(BootstrapKernel(ps, cfg).replicate(xi)), 0.0)


def draw_multipliers(n, seed, key=(), B=1):
    """Multipliers uniform on ``{0, 2}``; replicate ``b`` uses its own stream."""
    out = np.empty((B, n))
    for b in range(B):
        out[b] = 2.0 * _rng.stream(seed, _rng.MULTIPLIERS, *key, b).integers(0, 2, size=n)
    return out


def run_test(sample, cfg=None, key=()):
    """Multiplier-bootstrap test of extreme-value dependence.

    Parameters
    ----------
    sample : ndarray of shape (n, 2) or PseudoSample
    cfg : TestConfig
    key : tuple of int
        Extra stream key, so that repeated tests under one seed (e.g. Monte
        Carlo trials) use independent multipliers.

    Returns
    -------
    TestReport
        ``p_value = (1 + #{Z*_b >= stat}) / (B + 1)``.
    """
    cfg = TestConfig() if cfg is None else cfg
    start = time.perf_counter()
    ps = sample if hasattr(sample, "u") else pseudo_observations(sample)
    stat = test_statistic(ps, cfg)
    xi = draw_multipliers(ps.n, cfg.seed, key, cfg.B)
    reps = BootstrapKernel(ps, cfg).replicate(xi)
    clamped = int((reps < 0).sum())
    reps = np.maximum(reps, 0.0)
    p = (1 + int((reps >= stat).sum())) / (cfg.B + 1)
    crit = float(np.quantile(reps, 1 - cfg.alpha))
    reject = p <= cfg.alpha if cfg.decision == "pvalue" else stat > crit
    return TestReport(
        statistic=stat,
        replicates=reps,
        p_value=p,
        critical_value=crit,
        reject=bool(reject),
        n=ps.n,
        config=cfg,
        clamped=clamped,
        seconds=time.perf_counter() - start,
        key=tuple(key),
    )


# ---------------------------------------------------------------------------
# asymptotic power


@dataclass
class PowerApproximation:
    """``M_h(C, A*)``, the limiting standard deviation and the implied power."""

    distance: float
    sigma: float
    ratio: float
    power: float
    note: str = ""


def power_approximation(C, weight=None, n=200, ny=40, nt=10):
    """Approximate power ``Phi(sqrt(n) M / sigma)`` under a fixed alternative.

    ``sigma**2`` is the variance of the linear term of the statistic,
    ``4 int int Cov(G(x), G(x')) / (C(x) C(x')) v(x) v(x')`` over pairs of
    curve points ``x = (y**(1-t), y**t)``, with
    ``v(y, t) = -(log C / log y - A*(t)) y**k``.  It is evaluated on a
    product Gauss-Legendre grid (``ny`` nodes in ``y``, ``nt`` per half in ``t``).
    """
    weight = WeightSpec.hk(0.4, 0.02) if weight is None else weight
    if C.is_extreme_value:
        return PowerApproximation(0.0, float("nan"), 0.0, float("nan"), "extreme-value copula: no power beyond the level")
    M = min_distance(C, weight)
    lo, hi = weight.bounds
    lo = max(lo, 1e-12)
    hi = min(hi, 1 - 1e-12)
    xg, wg = roots_legendre(ny)
    y = lo + (hi - lo) * (xg + 1) / 2
    wy = wg * (hi - lo) / 2
    xt, wt = roots_legendre(nt)
    t = np.concatenate([(xt + 1) / 4, (xt + 1) / 4 + 0.5])
    wt = np.concatenate([wt, wt]) / 4
    astar = best_approx(C, weight, t)
    Y, T = np.meshgrid(y, t, indexing="ij")
    u, v = Y ** (1 - T), Y**T
    c = C.cdf(u, v)
    r = np.log(c) / np.log(Y)
    f = (-(r - astar) * Y**weight.k / c * np.outer(wy, wt)).ravel()
    uu, vv = u.ravel(), v.ravel()
    K = cov_gaussian_field(C, (uu[:, None], vv[:, None]), (uu[None, :], vv[None, :]))
    sigma = math.sqrt(max(4 * f @ K @ f, 0.0))
    ratio = M / sigma
    return PowerApproximation(M, sigma, ratio, float(special.ndtr(math.sqrt(n) * ratio)))
