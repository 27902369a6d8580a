"""Bivariate copula families used throughout the package.

Extreme-value families are defined through their Pickands dependence
function ``A`` and the representation ``C(y**(1-t), y**t) = y**A(t)``.  In
terms of ``(u, v)`` this reads ``C(u, v) = exp(log(uv) * A(log v / log(uv)))``.

Family names accepted by :func:`from_name`::

    independence
    gumbel(theta)            gumbel(rho=...)   gumbel(tau=...)
    mixed(theta)             mixed(rho=...)
    asy-neg-log(psi1, psi2, theta)             asy-neg-log(rho=...)
    huesler-reiss(theta)     huesler-reiss(rho=...)
    clayton(theta)           clayton(tau=...)
    frank(theta)             frank(tau=...)
    gaussian(rho)            gaussian(tau=...)
    t4(rho)                  t4(tau=...)
    shuffle-ce
    mix:<a>:<modelA>:<modelB>    # a * C_A + (1 - a) * C_B

``rho=`` is the coefficient of upper tail dependence ``2 (1 - A(1/2))`` and
``tau=`` is Kendall's tau.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize, special

__all__ = [
    "Pickands",
    "Copula",
    "EV_FAMILIES",
    "FAMILIES",
    "from_name",
    "param_from_tau",
    "param_from_tail",
    "bvn_cdf",
    "bvt4_cdf",
    "conditional_cdf",
]

EV_FAMILIES = ("gumbel", "mixed", "asy-neg-log", "huesler-reiss")
FAMILIES = (
    "independence",
    *EV_FAMILIES,
    "clayton",
    "frank",
    "gaussian",
    "t4",
    "shuffle-ce",
    "mix",
)

# default asymmetric negative logistic weights (psi1, psi2)
ANL_PSI = (1.0, 2.0 / 3.0)

_SQRT_HALF = math.sqrt(0.5)


def _softplus(x):
    return np.logaddexp(0.0, x)


@dataclass(frozen=True)
class Pickands:
    """Pickands dependence function of a bivariate extreme-value copula.

    Parameters
    ----------
    family : {'gumbel', 'mixed', 'asy-neg-log', 'huesler-reiss', 'constant1'}
    params : tuple of float
        ``(theta,)`` for gumbel, mixed and huesler-reiss;
        ``(psi1, psi2, theta)`` for asy-neg-log; empty for constant1.
    """

    family: str
    params: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        f, p = self.family, self.params
        if f == "constant1":
            ok = len(p) == 0
        elif f == "gumbel":
            ok = len(p) == 1 and p[0] >= 1
        elif f == "mixed":
            ok = len(p) == 1 and 0 <= p[0] <= 1
        elif f == "huesler-reiss":
            ok = len(p) == 1 and p[0] > 0
        elif f == "asy-neg-log":
            ok = len(p) == 3 and 0 < p[0] <= 1 and 0 < p[1] <= 1 and p[2] > 0
        else:
            raise ValueError(f"unknown Pickands family {f!r}")
        if not ok:
            raise ValueError(f"invalid parameters {p} for {f}")

    def __call__(self, t):
        return self.value(t)

    def value(self, t):
        t = np.asarray(t, dtype=float)
        if np.any((t < 0) | (t > 1)):
            raise ValueError("t must lie in [0, 1]")
        f = self.family
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if f == "constant1":
                a = np.ones_like(t)
            elif f == "gumbel":
                th = self.params[0]
                a = (t**th + (1 - t) ** th) ** (1 / th)
            elif f == "mixed":
                th = self.params[0]
                a = 1 - th * t + th * t * t
            elif f == "huesler-reiss":
                th = self.params[0]
                lr = np.log(t) - np.log1p(-t)
                a = (1 - t) * special.ndtr(th - lr / (2 * th)) + t * special.ndtr(
                    th + lr / (2 * th)
                )
            else:
                psi1, psi2, th = self.params
                la, lb = np.log(psi1 * (1 - t)), np.log(psi2 * t)
                # S = ((psi1 (1-t))^-th + (psi2 t)^-th)^(-1/th), S/a via softplus
                s_over_a = np.exp(-_softplus(th * (la - lb)) / th)
                a = 1 - psi1 * (1 - t) * s_over_a
        a = np.where((t == 0) | (t == 1), 1.0, a)
        return a if a.ndim else float(a)

    def derivative(self, t):
        """First derivative ``A'(t)`` (one-sided at the endpoints)."""
        t = np.asarray(t, dtype=float)
        f = self.family
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if f == "constant1":
                d = np.zeros_like(t)
            elif f == "gumbel":
                th = self.params[0]
                s = t**th + (1 - t) ** th
                d = s ** (1 / th - 1) * (t ** (th - 1) - (1 - t) ** (th - 1))
            elif f == "mixed":
                th = self.params[0]
                d = th * (2 * t - 1)
            elif f == "huesler-reiss":
                th = self.params[0]
                lr = np.log(t) - np.log1p(-t)
                d = special.ndtr(th + lr / (2 * th)) - special.ndtr(th - lr / (2 * th))
            else:
                psi1, psi2, th = self.params
                la, lb = np.log(psi1 * (1 - t)), np.log(psi2 * t)
                s_over_a = np.exp(-_softplus(th * (la - lb)) / th)
                s_over_b = np.exp(-_softplus(th * (lb - la)) / th)
                d = psi1 * s_over_a ** (th + 1) - psi2 * s_over_b ** (th + 1)
        return d if d.ndim else float(d)

    def mu(self, t):
        return self.value(t) - np.asarray(t) * self.derivative(t)

    def nu(self, t):
        return self.value(t) + (1 - np.asarray(t)) * self.derivative(t)

    @property
    def tail_dependence(self):
        return 2.0 * (1.0 - self.value(0.5))


# ---------------------------------------------------------------------------
# bivariate normal and t4 distribution functions


def bvn_cdf(h, k, rho):
    """P(X <= h, Y <= k) for a standard bivariate normal with correlation rho.

    Owen's T representation; vectorised over ``h`` and ``k``.
    """
    h, k = np.broadcast_arrays(np.asarray(h, float), np.asarray(k, float))
    if rho >= 1:
        return special.ndtr(np.minimum(h, k))
    s = math.sqrt(1 - rho * rho)
    # the representation is singular at 0; the cdf is continuous there
    h = np.where(h == 0, 1e-15, h)
    k = np.where(k == 0, 1e-15, k)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        th = special.owens_t(h, (k - rho * h) / (h * s))
        tk = special.owens_t(k, (h - rho * k) / (k * s))
    beta = np.where(h * k > 0, 0.0, 0.5)
    p = 0.5 * (special.ndtr(h) + special.ndtr(k)) - th - tk - beta
    p = np.where(np.isneginf(h) | np.isneginf(k), 0.0, p)
    p = np.where(np.isposinf(h), special.ndtr(k), p)
    p = np.where(np.isposinf(k), special.ndtr(h), p)
    return np.clip(p, 0.0, 1.0)


def bvt4_cdf(h, k, rho):
    """Bivariate Student t distribution function with 4 degrees of freedom.

    Dunnett & Sobel's finite series for even degrees of freedom.
    """
    nu = 4
    h, k = np.broadcast_arrays(np.asarray(h, float), np.asarray(k, float))
    if rho >= 1:
        return special.stdtr(nu, np.minimum(h, k))
    ors = 1 - rho * rho
    hrk = h - rho * k
    krh = k - rho * h
    with np.errstate(invalid="ignore", over="ignore"):
        xnhk = hrk**2 / (hrk**2 + ors * (nu + k**2))
        xnkh = krh**2 / (krh**2 + ors * (nu + h**2))
        xnhk = np.nan_to_num(xnhk, nan=1.0)
        xnkh = np.nan_to_num(xnkh, nan=1.0)
        hs = np.sign(hrk)
        ks = np.sign(krh)
        p = np.full(h.shape, math.atan2(math.sqrt(ors), -rho) / (2 * math.pi))
        gmph = h / np.sqrt(16 * (nu + h**2))
        gmpk = k / np.sqrt(16 * (nu + k**2))
        btnckh = 2 * np.arctan2(np.sqrt(xnkh), np.sqrt(1 - xnkh)) / math.pi
        btpdkh = 2 * np.sqrt(xnkh * (1 - xnkh)) / math.pi
        btnchk = 2 * np.arctan2(np.sqrt(xnhk), np.sqrt(1 - xnhk)) / math.pi
        btpdhk = 2 * np.sqrt(xnhk * (1 - xnhk)) / math.pi
        for j in range(1, nu // 2 + 1):
            p = p + gmph * (1 + ks * btnckh) + gmpk * (1 + hs * btnchk)
            btnckh = btnckh + btpdkh
            btpdkh = 2 * j * btpdkh * (1 - xnkh) / (2 * j + 1)
            btnchk = btnchk + btpdhk
            btpdhk = 2 * j * btpdhk * (1 - xnhk) / (2 * j + 1)
            gmph = gmph * (2 * j - 1) / (2 * j * (1 + h**2 / nu))
            gmpk = gmpk * (2 * j - 1) / (2 * j * (1 + k**2 / nu))
    p = np.where(np.isneginf(h) | np.isneginf(k), 0.0, p)
    p = np.where(np.isposinf(h), special.stdtr(nu, k), p)
    p = np.where(np.isposinf(k), special.stdtr(nu, h), p)
    return np.clip(p, 0.0, 1.0)


def conditional_cdf(family, rho, u, v, epsabs=1e-12):
    """Gaussian or t4 copula by integrating the conditional distribution.

    ``C(u, v) = int_{x <= q(u)} P(Y <= q(v) | X = x) f(x) dx`` by adaptive
    quadrature.  Scalar and slow; kept as an independent check of
    :func:`bvn_cdf` and :func:`bvt4_cdf`.
    """
    if u <= 0 or v <= 0:
        return 0.0
    if u >= 1:
        return float(v)
    if v >= 1:
        return float(u)
    s = math.sqrt(1 - rho * rho)
    if family == "gaussian":
        a, b = special.ndtri(u), special.ndtri(v)

        def f(x):
            return special.ndtr((b - rho * x) / s) * math.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)

    elif family == "t4":
        nu = 4
        a, b = special.stdtrit(nu, u), special.stdtrit(nu, v)

        def f(x):
            scale = math.sqrt((nu + x * x) * (1 - rho * rho) / (nu + 1))
            dens = 0.375 * (1 + x * x / nu) ** (-2.5)
            return special.stdtr(nu + 1, (b - rho * x) / scale) * dens

    else:
        raise ValueError("conditional_cdf supports 'gaussian' and 't4'")
    val, _ = integrate.quad(f, -np.inf, a, epsabs=epsabs, epsrel=1e-10, limit=200)
    return val


# ---------------------------------------------------------------------------
# copulas


def _shuffle_cdf(u, v):
    a = _SQRT_HALF
    lo_u, lo_v = u <= a, v <= a
    c1 = np.minimum(np.minimum(u, v), 0.5)
    c2 = np.minimum(u, v + 0.5 - a)
    c3 = np.minimum(u + 0.5 - a, v)
    c4 = np.minimum(np.minimum(u, v), u + v + 0.5 - 2 * a)
    return np.where(lo_u, np.where(lo_v, c1, c2), np.where(lo_v, c3, c4))


@dataclass(frozen=True)
class Copula:
    """A parametric bivariate copula.

    Parameters
    ----------
    family : str
        One of :data:`FAMILIES`.
    params : tuple of float
        Family parameters, see the module docstring.
    mix_weight : float, optional
        Weight of the first component for ``family='mix'``.
    components : tuple of Copula
        The two components of a ``'mix'`` copula.
    """

    family: str
    params: tuple = ()
    mix_weight: float | None = None
    components: tuple = field(default=(), repr=False)

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        f, p = self.family, self.params
        if f not in FAMILIES:
            raise ValueError(f"unknown copula family {f!r}")
        if f in EV_FAMILIES:
            Pickands(f, p)  # validates
            return
        if f in ("independence", "shuffle-ce"):
            ok = len(p) == 0
        elif f == "clayton":
            ok = len(p) == 1 and p[0] > 0
        elif f == "frank":
            ok = len(p) == 1 and p[0] != 0
        elif f in ("gaussian", "t4"):
            ok = len(p) == 1 and 0 <= p[0] <= 1
        else:
            w = self.mix_weight
            ok = (
                w is not None
                and 0 <= w <= 1
                and len(self.components) == 2
                and all(isinstance(c, Copula) for c in self.components)
            )
        if not ok:
            raise ValueError(f"invalid parameters {p} for {f}")

    def __str__(self):
        if self.family == "mix":
            a, b = self.components
            return f"mix:{self.mix_weight:g}:{a}:{b}"
        if not self.params:
            return self.family
        return f"{self.family}({','.join(f'{x:.10g}' for x in self.params)})"

    # -- structure ---------------------------------------------------------

    @property
    def is_extreme_value(self):
        return self.family in EV_FAMILIES or self.family == "independence"

    @property
    def is_pqd(self):
        """Whether the family/parameter combination satisfies C >= uv."""
        if self.family == "frank":
            return self.params[0] > 0
        if self.family == "mix":
            return all(c.is_pqd for c in self.components)
        return True

    @property
    def pickands(self):
        """The Pickands function for extreme-value families, else ``None``."""
        if self.family == "independence":
            return Pickands("constant1")
        if self.family in EV_FAMILIES:
            return Pickands(self.family, self.params)
        return None

    # -- distribution function ----------------------------------------------

    def cdf(self, u, v):
        """Copula value ``C(u, v)`` (vectorised)."""
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        if np.any((u < 0) | (u > 1) | (v < 0) | (v > 1)):
            raise ValueError("arguments must lie in [0, 1]")
        inner = (u > 0) & (v > 0) & (u < 1) & (v < 1)
        ui = np.where(inner, u, 0.5)
        vi = np.where(inner, v, 0.5)
        c = self._cdf_interior(ui, vi)
        c = np.where(inner, c, np.where((u == 0) | (v == 0), 0.0, np.where(u == 1, v, u)))
        return c if c.ndim else float(c)

    def _cdf_interior(self, u, v):
        f, p = self.family, self.params
        if f == "independence":
            return u * v
        if f in EV_FAMILIES:
            lu, lv = np.log(u), np.log(v)
            s = lu + lv
            return np.exp(s * self.pickands.value(lv / s))
        if f == "clayton":
            return np.exp(self._log_clayton(u, v))
        if f == "frank":
            th = p[0]
            return -np.log1p(np.expm1(-th * u) * np.expm1(-th * v) / np.expm1(-th)) / th
        if f == "gaussian":
            return bvn_cdf(special.ndtri(u), special.ndtri(v), p[0])
        if f == "t4":
            return bvt4_cdf(special.stdtrit(4, u), special.stdtrit(4, v), p[0])
        if f == "shuffle-ce":
            return _shuffle_cdf(u, v)
        a, b = self.components
        w = self.mix_weight
        return w * a.cdf(u, v) + (1 - w) * b.cdf(u, v)

    def _log_clayton(self, u, v):
        th = self.params[0]
        return -np.log1p(np.expm1(-th * np.log(u)) + np.expm1(-th * np.log(v))) / th

    def log_curve(self, y, t):
        """``log C(y**(1-t), y**t)``, broadcasting ``y`` against ``t``.

        Defined as 0 at ``y = 1`` and ``-inf`` at ``y = 0``.
        """
        y, t = np.broadcast_arrays(np.asarray(y, float), np.asarray(t, float))
        inner = (y > 0) & (y < 1)
        yi = np.where(inner, y, 0.5)
        ly = np.log(yi)
        if self.is_extreme_value:
            out = self.pickands.value(t) * ly
        else:
            with np.errstate(divide="ignore"):
                lu, lv = (1 - t) * ly, t * ly
                if self.family == "clayton":
                    out = self._log_clayton(np.exp(lu), np.exp(lv))
                else:
                    out = np.log(self.cdf(np.exp(lu), np.exp(lv)))
        out = np.where(inner, out, np.where(y >= 1, 0.0, -np.inf))
        return out if out.ndim else float(out)

    # -- partial derivatives -----------------------------------------------

    def partial(self, which, u, v):
        """Partial derivative ``dC/du`` (``which=1``) or ``dC/dv`` (``which=2``)."""
        if which not in (1, 2):
            raise ValueError("which must be 1 or 2")
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        x, y = (u, v) if which == 1 else (v, u)  # x: differentiated argument
        if np.any((x <= 0) | (x >= 1)):
            raise ValueError("partial derivative undefined on the boundary of the differentiated argument")
        if np.any((y < 0) | (y > 1)):
            raise ValueError("arguments must lie in [0, 1]")
        inner = (y > 0) & (y < 1)
        yi = np.where(inner, y, 0.5)
        uu, vv = (x, yi) if which == 1 else (yi, x)
        d = self._partial_interior(which, uu, vv)
        d = np.where(inner, np.clip(d, 0.0, 1.0), np.where(y >= 1, 1.0, 0.0))
        return d if d.ndim else float(d)

    def _partial_interior(self, which, u, v):
        f, p = self.family, self.params
        if f == "independence":
            return v if which == 1 else u
        if f in EV_FAMILIES:
            lu, lv = np.log(u), np.log(v)
            s = lu + lv
            t = lv / s
            A = self.pickands
            c = np.exp(s * A.value(t))
            return c * A.mu(t) / u if which == 1 else c * A.nu(t) / v
        if which == 2:
            # every remaining family is exchangeable except the mixture
            if f == "mix":
                a, b = self.components
                w = self.mix_weight
                return w * a.partial(2, u, v) + (1 - w) * b.partial(2, u, v)
            if f != "shuffle-ce":
                return self._partial_interior(1, v, u)
        if f == "clayton":
            th = p[0]
            return np.exp((-th - 1) * np.log(u) + (-1 / th - 1) * np.log1p(np.expm1(-th * np.log(u)) + np.expm1(-th * np.log(v))))
        if f == "frank":
            th = p[0]
            eu, ev = np.expm1(-th * u), np.expm1(-th * v)
            return np.exp(-th * u) * ev / (np.expm1(-th) + eu * ev)
        if f == "gaussian":
            r = p[0]
            if r >= 1:
                return (u <= v).astype(float)
            return special.ndtr((special.ndtri(v) - r * special.ndtri(u)) / math.sqrt(1 - r * r))
        if f == "t4":
            r = p[0]
            if r >= 1:
                return (u <= v).astype(float)
            xu, xv = special.stdtrit(4, u), special.stdtrit(4, v)
            scale = np.sqrt((4 + xu * xu) * (1 - r * r) / 5)
            return special.stdtr(5, (xv - r * xu) / scale)
        if f == "mix":
            a, b = self.components
            w = self.mix_weight
            return w * a.partial(1, u, v) + (1 - w) * b.partial(1, u, v)
        # central finite difference for the shuffle
        step = 1e-6
        if which == 1:
            lo, hi = np.maximum(u - step, 0.0), np.minimum(u + step, 1.0)
            return (self.cdf(hi, v) - self.cdf(lo, v)) / (hi - lo)
        lo, hi = np.maximum(v - step, 0.0), np.minimum(v + step, 1.0)
        return (self.cdf(u, hi) - self.cdf(u, lo)) / (hi - lo)

    # -- summaries ---------------------------------------------------------

    def tail_dependence(self):
        """Upper tail dependence ``2 (1 - A(1/2))`` of an extreme-value copula."""
        if not self.is_extreme_value:
            raise NotImplementedError(f"tail dependence via A is only defined for extreme-value families, not {self.family}")
        return self.pickands.tail_dependence

    # -- simulation --------------------------------------------------------

    def sample(self, n, seed=None):
        """Draw ``n`` pairs with uniform margins and copula ``self``.

        Parameters
        ----------
        n : int
        seed : int, numpy.random.SeedSequence or numpy.random.Generator
            Integers are fed to ``numpy.random.default_rng`` (PCG64).

        Returns
        -------
        ndarray of shape (n, 2)
        """
        if n < 1:
            raise ValueError("n must be positive")
        rng = np.random.default_rng(seed)
        f, p = self.family, self.params
        if f == "independence":
            return rng.random((n, 2))
        if f == "mix":
            pick = rng.random(n) < self.mix_weight
            a, b = self.components
            out = b.sample(n, rng)
            out[pick] = a.sample(int(pick.sum()), rng) if pick.any() else out[pick]
            return out
        if f in ("gaussian", "t4"):
            r = p[0]
            z = rng.standard_normal((n, 2))
            z[:, 1] = r * z[:, 0] + math.sqrt(max(1 - r * r, 0.0)) * z[:, 1]
            if f == "gaussian":
                return special.ndtr(z)
            w = np.sqrt(rng.chisquare(4, size=n) / 4)
            return special.stdtr(4, z / w[:, None])
        u = rng.random(n)
        w = rng.random(n)
        if f == "shuffle-ce":
            a = _SQRT_HALF
            v = np.select(
                [u < 0.5, u < a, u < 2 * a - 0.5],
                [u, u + a - 0.5, u - a + 0.5],
                2 * a + 0.5 - u,
            )
        elif f == "clayton":
            th = p[0]
            v = ((w ** (-th / (1 + th)) - 1) * u ** (-th) + 1) ** (-1 / th)
        elif f == "frank":
            th = p[0]
            v = -np.log1p(w * np.expm1(-th) / (w + (1 - w) * np.exp(-th * u))) / th
        else:
            v = self._invert_partial(u, w)
        return np.column_stack([u, v])

    def _invert_partial(self, u, w, tol=1e-10):
        # conditional distribution v -> dC/du(u, v) is nondecreasing from 0 to 1
        lo = np.zeros_like(u)
        hi = np.ones_like(u)
        u = np.clip(u, 1e-300, 1 - 1e-16)
        for _ in range(int(math.ceil(math.log2(1 / tol))) + 1):
            mid = 0.5 * (lo + hi)
            below = self.partial(1, u, mid) < w
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# parameter maps


def _debye1(x):
    if x == 0:
        return 1.0
    val, _ = integrate.quad(lambda s: s / math.expm1(s) if s else 1.0, 0, abs(x), epsabs=1e-14, epsrel=1e-13)
    d = val / abs(x)
    return d if x > 0 else d - x / 2  # D1(-x) = D1(x) + x/2


def frank_tau(theta):
    """Kendall's tau of the Frank copula."""
    return 1 - 4 / theta * (1 - _debye1(theta))


def param_from_tau(family, tau):
    """Parameter giving Kendall's tau ``tau`` for a one-parameter family."""
    if family == "clayton":
        if not 0 < tau < 1:
            raise ValueError("Clayton attains tau in (0, 1) for theta > 0")
        return 2 * tau / (1 - tau)
    if family == "gumbel":
        if not 0 <= tau < 1:
            raise ValueError("Gumbel attains tau in [0, 1)")
        return 1 / (1 - tau)
    if family in ("gaussian", "t4"):
        if not 0 <= tau <= 1:
            raise ValueError("positive dependence requires tau in [0, 1]")
        return math.sin(math.pi * tau / 2)
    if family == "frank":
        if not 0 < abs(tau) < 1:
            raise ValueError("Frank attains tau in (-1, 0) U (0, 1)")
        sign = 1.0 if tau > 0 else -1.0
        hi = 1.0
        while frank_tau(hi) < abs(tau):
            hi *= 2
        return sign * optimize.brentq(lambda th: frank_tau(th) - abs(tau), 1e-8, hi, xtol=1e-13)
    raise ValueError(f"no Kendall tau map for family {family!r}")


def param_from_tail(family, rho, psi=ANL_PSI):
    """Parameter giving upper tail dependence ``rho = 2 (1 - A(1/2))``.

    For ``asy-neg-log`` the weights are fixed to ``psi`` and the full
    parameter tuple ``(psi1, psi2, theta)`` is returned.
    """
    if family == "gumbel":
        if not 0 <= rho < 1:
            raise ValueError("Gumbel tail dependence lies in [0, 1)")
        return math.log(2) / math.log(2 - rho)
    if family == "mixed":
        if not 0 <= rho <= 0.5:
            raise ValueError("mixed model tail dependence lies in [0, 1/2]")
        return 2 * rho
    if family == "huesler-reiss":
        if not 0 < rho < 1:
            raise ValueError("Huesler-Reiss tail dependence lies in (0, 1)")
        return float(special.ndtri(1 - rho / 2))
    if family == "asy-neg-log":
        psi1, psi2 = psi
        rmax = 2 * (1 - Pickands("asy-neg-log", (psi1, psi2, 1e6)).value(0.5))

        def g(lth):
            return Pickands("asy-neg-log", (psi1, psi2, math.exp(lth))).tail_dependence - rho

        if not 0 < rho < rmax:
            raise ValueError(f"tail dependence must lie in (0, {rmax:.6g}) for psi={psi}")
        lth = optimize.brentq(g, math.log(1e-4), math.log(1e4), xtol=1e-14, rtol=1e-14)
        return (psi1, psi2, math.exp(lth))
    raise ValueError(f"no tail dependence map for family {family!r}")


# ---------------------------------------------------------------------------
# name parsing

_CALL = re.compile(r"^\s*([a-z0-9\-]+)\s*(?:\((.*)\))?\s*$")


def _split_mix(rest):
    # split "<modelA>:<modelB>" on the first colon outside parentheses
    depth = 0
    for i, ch in enumerate(rest):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == ":" and depth == 0:
            return rest[:i], rest[i + 1 :]
    raise ValueError("mix needs two component models")


def from_name(name):
    """Build a :class:`Copula` from a string such as ``'clayton(tau=0.5)'``."""
    name = name.strip()
    if name.startswith("mix:"):
        _, w, rest = name.split(":", 2)
        a, b = _split_mix(rest)
        return Copula("mix", (), float(w), (from_name(a), from_name(b)))
    m = _CALL.match(name)
    if not m:
        raise ValueError(f"cannot parse copula name {name!r}")
    family, args = m.group(1), m.group(2)
    if family not in FAMILIES:
        raise ValueError(f"unknown copula family {family!r}")
    if not args:
        return Copula(family)
    args = [a.strip() for a in args.split(",") if a.strip()]
    if len(args) == 1 and "=" in args[0]:
        key, val = (s.strip() for s in args[0].split("="))
        val = float(val)
        if key == "tau":
            return Copula(family, (param_from_tau(family, val),))
        if key == "rho":
            p = param_from_tail(family, val)
            return Copula(family, p if isinstance(p, tuple) else (p,))
        raise ValueError(f"unknown keyword {key!r}")
    return Copula(family, tuple(float(a) for a in args))
