"""Model-level quantities: best approximations, distances, variances and optimal weights.

For a copula ``C`` and weight ``h`` with associated weight
``h*(y) = (log y)**2 h(y)`` and ``B_h = int h*``, the best weighted-L2
approximation of ``log C(y**(1-t), y**t)`` by ``A(t) log y`` is

    A*(t) = B_h**-1 int_0^1 log C(y**(1-t), y**t) / log y * h*(y) dy

and the minimal distance is

    M_h(C, A*) = int_0^1 int_0^1 (log C(y**(1-t), y**t) / log y - A*(t))**2 h*(y) dy dt.

``A* = A`` and ``M_h = 0`` exactly when ``C`` is an extreme-value copula.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import roots_laguerre, roots_legendre

from .copulas import Copula
from .estimators import WeightSpec

__all__ = [
    "Y_CLIP",
    "ConvergenceError",
    "best_approx",
    "best_approx_curve",
    "min_distance",
    "min_distance_uncentered",
    "ConvexityReport",
    "convexity_report",
    "cov_gaussian_field",
    "kernel",
    "independence_kernel",
    "asymptotic_variance_hk",
    "asymptotic_variance_hk_double",
    "variance_functional",
    "hk_discrete",
    "kernel_matrix",
    "frank_wolfe_simplex",
    "OptimalWeight",
    "optimal_weight",
    "t_nodes",
]

# y-integrals are restricted to [Y_CLIP, 1 - Y_CLIP]; the neglected tails are
# below 1e-12 relative because h* vanishes at both ends
Y_CLIP = 1e-12


class ConvergenceError(RuntimeError):
    """Iterative solver stopped before meeting its tolerance."""

    def __init__(self, msg, residual):
        super().__init__(f"{msg} (residual {residual:.3e})")
        self.residual = residual


def _require_pqd(C):
    if not C.is_pqd:
        raise ValueError(f"{C} is not positive quadrant dependent; A* needs C >= uv")


def _window(weight):
    lo, hi = weight.bounds
    return max(lo, Y_CLIP), min(hi, 1 - Y_CLIP)


def t_nodes(n=60):
    """Gauss-Legendre nodes and weights on ``[0, 1]``, two panels split at 1/2.

    The split matters: asymmetric integrands are not smooth at ``t = 1/2``
    for some families.
    """
    x, w = roots_legendre(n)
    t = np.concatenate([(x + 1) / 4, (x + 1) / 4 + 0.5])
    return t, np.concatenate([w, w]) / 4


def _ratio(C, y, t):
    # log C(y^(1-t), y^t) / log y, in [max(t, 1-t), 1] for PQD copulas
    return C.log_curve(y, t) / np.log(y)


def best_approx(C, weight, t, epsabs=1e-13, epsrel=1e-11):
    """Best approximation ``A*(t)`` by adaptive quadrature (vectorised over ``t``).

    Endpoints ``t = 0`` and ``t = 1`` return exactly 1.
    """
    _require_pqd(C)
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.ones_like(t)
    inner = (t > 0) & (t < 1)
    if inner.any():
        ti = t[inner]
        lo, hi = _window(weight)
        if weight.kind == "discrete":
            loc = np.asarray(weight.locations)[:, None]
            m = np.asarray(weight.masses)
            out[inner] = m @ _ratio(C, loc, ti)
        else:
            num, _ = integrate.quad_vec(
                lambda y: _ratio(C, y, ti) * weight.hstar(y), lo, hi, epsabs=epsabs, epsrel=epsrel
            )
            out[inner] = num / weight.B
    return float(out[0]) if scalar else out


def best_approx_curve(C, weight, t_grid=None):
    from .estimators import DependenceCurve, default_grid

    t = default_grid() if t_grid is None else np.asarray(t_grid, float)
    return DependenceCurve(t, best_approx(C, weight, t), f"A*[{C},{weight.label()}]")


def min_distance(C, weight, nt=60, epsabs=1e-14, epsrel=1e-10):
    """Minimal distance ``M_h(C, A*)``.

    Computed in the centered form ``int int (r - A*)**2 h*`` with
    ``r = log C / log y``, which avoids the cancellation in
    ``int int r**2 h* - B_h int A***2``.  The ``y``-integral is adaptive
    (vectorised over the ``t`` nodes), the ``t``-integral Gauss-Legendre.
    """
    _require_pqd(C)
    if weight.kind != "hk":
        raise ValueError("min_distance needs an h_k weight")
    t, wt = t_nodes(nt)
    lo, hi = _window(weight)
    astar = best_approx(C, weight, t)
    inner, _ = integrate.quad_vec(
        lambda y: (_ratio(C, y, t) - astar) ** 2 * weight.hstar(y), lo, hi, epsabs=epsabs, epsrel=epsrel
    )
    return float(wt @ inner)


def min_distance_uncentered(C, weight, nt=60, epsabs=1e-14, epsrel=1e-10):
    """``int int r**2 h* - B_h int A***2``; equal to :func:`min_distance` analytically."""
    _require_pqd(C)
    t, wt = t_nodes(nt)
    lo, hi = _window(weight)
    astar = best_approx(C, weight, t)
    sq, _ = integrate.quad_vec(lambda y: _ratio(C, y, t) ** 2 * weight.hstar(y), lo, hi, epsabs=epsabs, epsrel=epsrel)
    return max(float(wt @ sq - weight.B * (wt @ astar**2)), 0.0)


# ---------------------------------------------------------------------------
# convexity


@dataclass
class ConvexityReport:
    """Outcome of the shape checks on ``g_y(t) = -log C(y**(1-t), y**t)`` and ``A*``.

    Each ``*_witness`` is ``None`` when the check passed, otherwise the
    first offending ``(y, t)`` (or ``t``) together with the margin.
    """

    midpoint_convex: bool
    midpoint_witness: tuple | None
    curvature_ok: bool
    curvature_witness: tuple | None
    astar_ok: bool
    astar_witness: tuple | None

    @property
    def passed(self):
        return self.midpoint_convex and self.curvature_ok and self.astar_ok


def convexity_report(C, t_grid=None, y_grid=None, weight=None, step=1e-4, tol=1e-6):
    """Check convexity of ``g_y`` and the Pickands bounds of ``A*``.

    (i) midpoint convexity ``g_y(t_i) <= (g_y(t_{i-1}) + g_y(t_{i+1})) / 2``
    on an equispaced ``t_grid`` for every ``y``;
    (ii) ``f'**2 >= f'' f`` for ``f = C(y**(1-t), y**t)`` with central
    differences of step ``step``;
    (iii) ``A*(0) = A*(1) = 1`` and ``max(t, 1-t) <= A* <= 1``.
    """
    t = np.linspace(0, 1, 101) if t_grid is None else np.asarray(t_grid, float)
    y = np.linspace(0.05, 0.95, 19) if y_grid is None else np.asarray(y_grid, float)
    weight = WeightSpec.hk(0.4) if weight is None else weight
    Y, T = np.meshgrid(y, t, indexing="ij")

    g = -C.log_curve(Y, T)
    gap = g[:, 1:-1] - 0.5 * (g[:, :-2] + g[:, 2:])
    scale = 1e-12 * np.maximum(1.0, np.abs(g[:, 1:-1]))
    bad = gap > scale
    mid_w = None
    if bad.any():
        i, j = np.argwhere(bad)[0]
        mid_w = (float(y[i]), float(t[j + 1]), float(gap[i, j]))

    ti = t[(t - step > 0) & (t + step < 1)]
    Y2, T2 = np.meshgrid(y, ti, indexing="ij")
    f0 = C.cdf(Y2 ** (1 - T2), Y2**T2)
    fp = C.cdf(Y2 ** (1 - T2 - step), Y2 ** (T2 + step))
    fm = C.cdf(Y2 ** (1 - T2 + step), Y2 ** (T2 - step))
    d1 = (fp - fm) / (2 * step)
    d2 = (fp - 2 * f0 + fm) / step**2
    lhs = d1**2 - d2 * f0
    badc = lhs < -tol * np.maximum(1.0, np.abs(d1**2) + np.abs(d2 * f0))
    curv_w = None
    if badc.any():
        i, j = np.argwhere(badc)[0]
        curv_w = (float(y[i]), float(ti[j]), float(lhs[i, j]))

    astar = best_approx(C, weight, t)
    lower = np.maximum(t, 1 - t)
    bad_a = (astar < lower - 1e-10) | (astar > 1 + 1e-10)
    ends = astar[0] == 1.0 and astar[-1] == 1.0 if t[0] == 0 and t[-1] == 1 else True
    a_w = None
    if bad_a.any() or not ends:
        j = int(np.argmax(bad_a)) if bad_a.any() else 0
        a_w = (float(t[j]), float(astar[j]))
    return ConvexityReport(mid_w is None, mid_w, curv_w is None, curv_w, a_w is None, a_w)


# ---------------------------------------------------------------------------
# Gaussian field covariance and kernels


def _boundary(p1, p2):
    return (p1 <= 0) | (p1 >= 1) | (p2 <= 0) | (p2 >= 1)


def cov_gaussian_field(C, x, y):
    """Covariance of the limiting empirical copula process at ``x`` and ``y``.

    The process is ``G = B - d1C B(., 1) - d2C B(1, .)`` with ``B`` a
    Brownian bridge of covariance ``C(a ^ b) - C(a) C(b)``.  ``x`` and ``y``
    are pairs of arrays ``(x1, x2)``; broadcasting applies.  The process is
    pinned to 0 on the boundary of the unit square, where 0 is returned.
    """
    x1, x2, y1, y2 = np.broadcast_arrays(*(np.asarray(a, float) for a in (*x, *y)))
    edge = _boundary(x1, x2) | _boundary(y1, y2)
    x1, x2, y1, y2 = (np.where(edge, 0.5, a) for a in (x1, x2, y1, y2))
    one = np.ones_like(x1)
    cx, cy = C.cdf(x1, x2), C.cdf(y1, y2)
    X = [(x1, x2, cx, 1.0), (x1, one, x1, -C.partial(1, x1, x2)), (one, x2, x2, -C.partial(2, x1, x2))]
    Y = [(y1, y2, cy, 1.0), (y1, one, y1, -C.partial(1, y1, y2)), (one, y2, y2, -C.partial(2, y1, y2))]
    s = 0.0
    for p1, p2, cp, a in X:
        for q1, q2, cq, b in Y:
            s = s + a * b * (C.cdf(np.minimum(p1, q1), np.minimum(p2, q2)) - cp * cq)
    s = np.where(edge, 0.0, s)
    return s if s.ndim else float(s)


def _curve_point(y, t):
    return y ** (1 - t), y**t


def kernel(C, t, x, y):
    """``k_t(x, y) = Cov(G(x_t), G(y_t)) / (C(x_t) C(y_t) log x log y)``.

    ``x_t = (x**(1-t), x**t)``.  This is the covariance of the limit of
    ``sqrt(n) (log C~_n - log C) / log`` along the curves.
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    px, py = _curve_point(x, t), _curve_point(y, t)
    cov = cov_gaussian_field(C, px, py)
    # C(x_t) log x = x^{A} log x for EV copulas; computed directly otherwise
    denom = C.cdf(*px) * C.cdf(*py) * np.log(x) * np.log(y)
    return cov / denom


def independence_kernel(t, x, y):
    """Closed form of :func:`kernel` for the independence copula."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    num = (np.minimum(x**t, y**t) - (x * y) ** t) * (np.minimum(x ** (1 - t), y ** (1 - t)) - (x * y) ** (1 - t))
    return num / (x * np.log(x) * y * np.log(y))


# ---------------------------------------------------------------------------
# asymptotic variance for the h_k family


def asymptotic_variance_hk(A, t, k, epsabs=1e-14, epsrel=1e-12):
    """Asymptotic variance of ``sqrt(n) (A_hat_{h_k}(t) - A(t))`` for an extreme-value copula.

    Closed-form terms in ``A(t)``, ``mu = A - t A'`` and ``nu = A + (1-t) A'``
    plus three one-dimensional integrals over ``A``.  Returns 0 at
    ``t`` in {0, 1}, where the limit is pinned.

    Parameters
    ----------
    A : Pickands
    t : float
    k : float
        Exponent of the weight ``h_k``.
    """
    if isinstance(A, Copula):
        A = A.pickands
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    if k < 0:
        raise ValueError("k must be nonnegative")
    if t in (0.0, 1.0):
        return 0.0
    a = A.value(t)
    d = A.derivative(t)
    mu, nu = a - t * d, a + (1 - t) * d
    k1 = k + 1
    c = k1**2 / (t * (1 - t))

    def q(f, lo, hi):
        return integrate.quad(lambda s: f(s) ** -2, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=200)[0]

    i1 = q(lambda s: A.value(s) + k1 * ((1 - s) / (1 - t) + s / t) - 1, 0, 1)
    i2 = q(lambda s: A.value(s) + (k + t) * (1 - s) / (1 - t) + (k1 - a) * s / t, 0, t)
    i3 = q(lambda s: A.value(s) + (k1 - a) * (1 - s) / (1 - t) + (k1 - t) * s / t, t, 1)
    return k1**2 * (
        2 * k1 / (2 * k1 - a)
        - (mu + nu - 1) ** 2
        - 2 * mu * (1 - mu) * k1 / (2 * k + 1 + t)
        - 2 * nu * (1 - nu) * k1 / (2 * k1 - t)
        + 2 * mu * nu * c * i1
        - 2 * mu * c * i2
        - 2 * nu * c * i3
    )


def asymptotic_variance_hk_double(C, t, k, n=200, method="laguerre"):
    """Same variance as a double integral of the field covariance.

    ``(k+1)**4 int int Cov(G(u_t), G(v_t)) (uv)**(k - A(t)) du dv`` with
    ``u_t = (u**(1-t), u**t)``.  After ``u = exp(-x)`` the integrand is
    symmetric, so only the triangle ``x < x'`` is integrated and doubled.

    Parameters
    ----------
    C : Copula
        An extreme-value copula.
    t, k : float
    n : int
        Nodes per axis of the product Gauss-Laguerre rule (rate ``k + 1``)
        in the coordinates ``(x, x' - x)``.
    method : {'laguerre', 'adaptive'}
        ``'adaptive'`` uses ``scipy.integrate.dblquad`` instead; it is far
        slower.
    """
    A = C.pickands
    if A is None:
        raise ValueError("needs an extreme-value copula")
    if t in (0.0, 1.0):
        return 0.0
    a = A.value(t)
    rate = k + 1

    def f(x, xp):
        u, v = np.exp(-x), np.exp(-xp)
        s = cov_gaussian_field(C, _curve_point(u, t), _curve_point(v, t))
        return s * np.exp(-(k + 1 - a) * (x + xp))

    if method == "laguerre":
        z, w = roots_laguerre(n)
        keep = w > 0  # trailing weights underflow for large n
        # fold the Laguerre weight exp(-z) back into the quadrature weights
        w = np.exp(np.log(w[keep]) + z[keep]) / rate
        z = z[keep] / rate
        X, S = np.meshgrid(z, z, indexing="ij")
        val = np.sum(np.outer(w, w) * f(X, X + S))
    elif method == "adaptive":
        xmax = 80.0 / rate
        val, _ = integrate.dblquad(lambda xp, x: f(x, xp), 0, xmax, lambda x: x, lambda x: xmax, epsabs=1e-12, epsrel=1e-9)
    else:
        raise ValueError("method must be 'laguerre' or 'adaptive'")
    return 2 * (k + 1) ** 4 * float(val)


# ---------------------------------------------------------------------------
# discrete weights and the optimal-weight problem


def variance_functional(C, t, weight):
    """``V(xi) = sum_ij m_i m_j k_t(x_i, x_j)`` for a discrete weight."""
    if weight.kind != "discrete":
        raise ValueError("variance_functional needs a discrete weight")
    loc = np.asarray(weight.locations)
    m = np.asarray(weight.masses)
    K = kernel(C, t, loc[:, None], loc[None, :])
    return float(m @ K @ m)


def _cell_grid(N):
    return (np.arange(1, N + 1) - 0.5) / N


def hk_discrete(k, N):
    """Discretisation of ``h_k*(y) dy / B`` on ``N`` equal cells.

    Atoms sit at the cell midpoints ``(i - 1/2)/N`` and carry the exact cell
    integral of the normalised associated weight.
    """
    edges = np.linspace(0, 1, N + 1)
    G = WeightSpec._hstar_antiderivative(edges, k) * (k + 1) ** 2
    m = np.diff(G)
    return WeightSpec.discrete(_cell_grid(N), m / m.sum())


def kernel_matrix(C, t, N):
    """``K_ij = k_t(x_i, x_j)`` on the cell midpoints ``x_i = (i - 1/2)/N``."""
    x = _cell_grid(N)
    if C.family == "independence":
        K = independence_kernel(t, x[:, None], x[None, :])
    else:
        K = kernel(C, t, x[:, None], x[None, :])
    return x, 0.5 * (K + K.T)


def frank_wolfe_simplex(K, tol=1e-6, max_iter=100_000, x0=None):
    """Minimise ``x' K x`` over the probability simplex.

    Frank-Wolfe with away steps and exact line search.  Optimality is
    certified by the residual ``V - min_i (K x)_i``, which vanishes exactly
    at a minimiser (it is half the Frank-Wolfe duality gap).  Iteration
    stops once the residual is at most ``tol * V``.

    Returns
    -------
    x : ndarray
    V : float
    residual : float
    iterations : int
    """
    K = np.asarray(K, float)
    n = K.shape[0]
    if x0 is None:
        x = np.zeros(n)
        x[int(np.argmin(np.diag(K)))] = 1.0
    else:
        x = np.array(x0, float)
    Kx = K @ x
    V = float(x @ Kx)
    res = np.inf
    for it in range(max_iter):
        V = float(x @ Kx)
        s = int(np.argmin(Kx))
        res = V - Kx[s]
        if res <= tol * max(V, 0.0) or res <= 1e-300:
            return x, V, float(res), it
        active = np.flatnonzero(x > 0)
        a = active[int(np.argmax(Kx[active]))]
        fw_gap = V - Kx[s]
        away_gap = Kx[a] - V
        if fw_gap >= away_gap:
            # move towards vertex s: x + g (e_s - x)
            d_Kd = K[s, s] - 2 * Kx[s] + V
            gmax = 1.0
            slope = fw_gap
            g = gmax if d_Kd <= 0 else min(slope / d_Kd, gmax)
            x *= 1 - g
            x[s] += g
            Kx = (1 - g) * Kx + g * K[:, s]
        else:
            # move away from vertex a: x + g (x - e_a)
            d_Kd = V - 2 * Kx[a] + K[a, a]
            gmax = x[a] / (1 - x[a]) if x[a] < 1 else np.inf
            g = gmax if d_Kd <= 0 else min(away_gap / d_Kd, gmax)
            x *= 1 + g
            x[a] -= g
            if g == gmax:
                x[a] = 0.0
            Kx = (1 + g) * Kx - g * K[:, a]
        np.maximum(x, 0.0, out=x)
    raise ConvergenceError("Frank-Wolfe did not converge", res)


@dataclass
class OptimalWeight:
    """Solution of the discretised optimal-weight problem."""

    weight: WeightSpec
    V: float
    residual: float
    iterations: int
    grid: np.ndarray
    masses: np.ndarray


def optimal_weight(C, t, N=100, tol=1e-6, max_iter=100_000, prune=1e-10):
    """Discrete weight minimising the asymptotic variance at ``t``.

    Solves ``min xi' K_t xi`` over the simplex on the grid ``(i - 1/2)/N``.
    The returned residual is ``V - min_i (K xi)_i``; it certifies
    optimality because ``V(xi) <= int k_t(x, .) d xi`` for all ``x``
    characterises the minimiser.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    x, K = kernel_matrix(C, t, N)
    m, V, res, it = frank_wolfe_simplex(K, tol=tol, max_iter=max_iter)
    keep = m > prune
    w = WeightSpec.discrete(x[keep], m[keep] / m[keep].sum())
    return OptimalWeight(w, V, res, it, x, m)
