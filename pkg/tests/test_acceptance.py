"""Acceptance criteria, one test each.

Each test logs a single PASS/FAIL line (shown in the terminal summary) and
then asserts.  Run ``pytest tests/test_acceptance.py -v`` or execute this
file directly.  The Monte Carlo criteria honour ``PICKANDS_WORKERS``.
"""

import functools
import math

import numpy as np
import pytest
from scipy import integrate

from pickands.approximation import (
    asymptotic_variance_hk,
    asymptotic_variance_hk_double,
    best_approx,
    convexity_report,
    hk_discrete,
    min_distance,
    optimal_weight,
    variance_functional,
)
from pickands.copulas import Copula, Pickands, from_name
from pickands.empirical import PseudoSample, curve_steps
from pickands.estimators import (
    WeightSpec,
    cfg_integral_form,
    estimate_cfg,
    estimate_md,
    estimate_pickands,
    pickands_integral_form,
)
from pickands.evdtest import TestConfig, power_approximation
from pickands.experiments import ANL_RHOS, MIXED_RHOS, run_k_sweep, run_mise, run_power_table

TAU_MODELS = ("clayton(tau=0.5)", "frank(tau=0.5)", "gaussian(tau=0.5)", "t4(tau=0.5)")
# truncation window of the associated weight used for the distance values
# and the test (see the README)
EPS = 0.02


def rel(a, b):
    return abs(a - b) / abs(b)


# -- 1 ----------------------------------------------------------------------------


def test_variance_closed_form(acceptance_log):
    A = Pickands("constant1")
    worst = 0.0
    for k in (0.0, 0.5, 1.0, 5.0):
        for t in np.arange(1, 10) / 10:
            if k == 0:
                ref = 3 * t * (1 - t) / ((2 - t) * (1 + t))
            else:
                ref = (3 + 4 * k) * (k + 1) ** 2 / (2 * k + 1) * t * (1 - t) / ((2 * k + 2 - t) * (2 * k + 1 + t))
            worst = max(worst, rel(asymptotic_variance_hk(A, t, k), ref))
    ok = worst <= 1e-6
    acceptance_log(1, ok, f"independence variance vs closed form, max rel err {worst:.2e} (tol 1e-6)")
    assert ok


# -- 2 ----------------------------------------------------------------------------


def test_variance_two_routes(acceptance_log):
    C = Copula("gumbel", (2.0,))
    worst = 0.0
    for k in (0.0, 1.0):
        for t in (0.25, 0.5, 0.75):
            worst = max(worst, rel(asymptotic_variance_hk_double(C, t, k), asymptotic_variance_hk(C, t, k)))
    ok = worst <= 1e-4
    acceptance_log(2, ok, f"Gumbel(2) variance, 1-d integrals vs field double integral, max rel err {worst:.2e} (tol 1e-4)")
    assert ok


# -- 3 ----------------------------------------------------------------------------

GOLDEN_DISTANCE = {"clayton(tau=0.5)": 1.65e-3, "frank(tau=0.5)": 5.87e-4, "gaussian(tau=0.5)": 2.08e-4, "t4(tau=0.5)": 1.18e-4}


@pytest.mark.slow
def test_minimal_distance_golden_values(acceptance_log):
    parts, ok = [], True
    for name, ref in GOLDEN_DISTANCE.items():
        C = from_name(name)
        m = min_distance(C, WeightSpec.hk(0.4, EPS))
        m0 = min_distance(C, WeightSpec.hk(0.4))
        e = rel(m, ref)
        ok &= e <= 0.05
        parts.append(f"{C.family} {m:.4g} ({e:+.1%}; untruncated {m0:.4g})")
    acceptance_log(3, ok, f"M_h, h_0.4 on [{EPS}, {1 - EPS}]: " + ", ".join(parts))
    assert ok


# -- 4 ----------------------------------------------------------------------------


@pytest.mark.slow
def test_best_approximation_properties(acceptance_log):
    models = ("independence", "gumbel(2)", "mixed(0.8)", "asy-neg-log(rho=0.4)", "huesler-reiss(rho=0.5)",
              "clayton(2)", "frank(tau=0.5)", "gaussian(tau=0.5)", "t4(tau=0.5)", "shuffle-ce",
              "mix:0.5:gumbel(2):clayton(tau=0.5)")
    t = np.linspace(0, 1, 101)
    bad = []
    for name in models:
        C = from_name(name)
        a = best_approx(C, WeightSpec.hk(0.4), t)
        if not (a[0] == 1.0 and a[-1] == 1.0 and np.all(a >= np.maximum(t, 1 - t) - 1e-10) and np.all(a <= 1 + 1e-10)):
            bad.append(name)
    clayton = convexity_report(from_name("clayton(2)"))
    shuffle = convexity_report(Copula("shuffle-ce"), y_grid=np.array([0.5]))
    ok = not bad and clayton.passed and not shuffle.midpoint_convex
    detail = (f"A* bounds on {len(models)} PQD models ({'all ok' if not bad else 'failed: ' + ', '.join(bad)}); "
              f"Clayton curvature {'ok' if clayton.curvature_ok else clayton.curvature_witness}; "
              f"shuffle midpoint violation {shuffle.midpoint_witness}")
    acceptance_log(4, ok, detail)
    assert ok


# -- 5 ----------------------------------------------------------------------------


def test_estimator_internal_consistency(acceptance_log):
    models = ("gumbel(2)", "clayton(1)", "independence", "asy-neg-log(rho=0.4)", "frank(5)")
    t = np.linspace(0, 1, 11)
    sum_err, md_err = 0.0, 0.0
    rng = np.random.default_rng(2024)
    for s in range(50):
        C = from_name(models[s % len(models)])
        n = int(rng.integers(5, 60))
        ps = PseudoSample.from_uniform(C.sample(n, seed=s))
        sum_err = max(sum_err, np.max(np.abs(pickands_integral_form(ps, t) / estimate_pickands(ps, t) - 1)))
        sum_err = max(sum_err, np.max(np.abs(cfg_integral_form(ps, t) / estimate_cfg(ps, t) - 1)))
        for tj in (0.0, 0.3, 0.5, 0.85):
            step = curve_steps(ps, tj, 0.95)
            edges = [0.0, *step.breakpoints, 1.0]
            q = sum(integrate.quad(lambda y: math.log(step(y)) * y**0.4, a, b, epsabs=1e-14, epsrel=1e-13)[0]
                    for a, b in zip(edges[:-1], edges[1:]))
            md_err = max(md_err, rel(estimate_md(ps, tj, WeightSpec.hk(0.4), 0.95), -q * 1.4**2))
    ok = sum_err <= 1e-8 and md_err <= 1e-8
    acceptance_log(5, ok, f"50 samples: sum vs integral forms rel err {sum_err:.1e}, MD exact vs adaptive {md_err:.1e} (tol 1e-8)")
    assert ok


# -- 6, 7 -----------------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def rejection_table():
    models = ("independence", "gumbel(rho=0.5)", "clayton(tau=0.5)", "frank(tau=0.5)")
    rows = run_power_table(models, n=200, trials=200, cfg=TestConfig(B=200), alphas=(0.05, 0.1), seed=0)
    return {m: r for m, r in zip(models, rows)}


@pytest.mark.slow
def test_level(acceptance_log):
    tab = rejection_table()
    ind = tab["independence"]["reject_0.05"]
    gum = tab["gumbel(rho=0.5)"]["reject_0.05"]
    ok = abs(ind - 0.031) <= 0.035 and abs(gum - 0.029) <= 0.035
    acceptance_log(6, ok, f"level at 5% (n=200, 200 trials, B=200): independence {ind:.3f} (0.031 +- 0.035), "
                          f"Gumbel rho=0.5 {gum:.3f} (0.029 +- 0.035)")
    assert ok


@pytest.mark.slow
def test_power(acceptance_log):
    tab = rejection_table()
    cl = tab["clayton(tau=0.5)"]["reject_0.05"]
    fr = tab["frank(tau=0.5)"]["reject_0.05"]
    ok = cl >= 0.95 and abs(fr - 0.73) <= 0.10
    acceptance_log(7, ok, f"power at 5%: Clayton tau=0.5 {cl:.3f} (>= 0.95), Frank tau=0.5 {fr:.3f} (0.73 +- 0.10)")
    assert ok


# -- 8 ----------------------------------------------------------------------------------


def test_optimal_weight(acceptance_log):
    C = Copula("independence")
    ok, parts = True, []
    for t in (0.25, 0.5):
        res = optimal_weight(C, t, N=100, tol=1e-6)
        v = {k: variance_functional(C, t, hk_discrete(k, 100)) for k in (0.0, 1.0, 5.0)}
        good = res.residual <= 1e-6 * res.V and res.V < v[0.0] and res.V <= v[1.0] and res.V <= v[5.0]
        ok &= good
        parts.append(f"t={t}: V={res.V:.5f} residual/V={res.residual / res.V:.1e} V(h0)={v[0.0]:.5f} "
                     f"V(h1)={v[1.0]:.5f} V(h5)={v[5.0]:.5f}")
    acceptance_log(8, ok, "; ".join(parts))
    assert ok


# -- 9 ----------------------------------------------------------------------------------


@pytest.mark.slow
def test_mise_ordering(acceptance_log):
    losers = []
    for family, rhos in (("asy-neg-log", ANL_RHOS), ("mixed", MIXED_RHOS)):
        models = [f"{family}(rho={r})" for r in rhos]
        rows = run_mise(models, ("pickands", "md:0.4"), n=100, replicates=500, seed=0)
        for i in range(0, len(rows), 2):
            p, m = rows[i]["mise"], rows[i + 1]["mise"]
            if not m < p:
                losers.append(f"{rows[i]['model']} md {m:.5f} >= pickands {p:.5f}")
    _, summary = run_k_sweep("asy-neg-log", ANL_RHOS, n=100, replicates=500, seed=0)
    kstar = summary["worst_case_argmin"]
    ok = not losers and 0.2 <= kstar <= 0.6
    acceptance_log(9, ok, f"MD(0.4) < Pickands on {len(ANL_RHOS) + len(MIXED_RHOS)} models"
                          f"{'' if not losers else ' FAILED: ' + '; '.join(losers)}; "
                          f"k-sweep worst-case argmin {kstar:g} (per rho {summary['argmin']})")
    assert ok


# -- 10 ---------------------------------------------------------------------------------


@pytest.mark.slow
def test_power_ratios(acceptance_log):
    w = WeightSpec.hk(0.4, EPS)
    ratios = {name: power_approximation(from_name(name), w).ratio for name in TAU_MODELS}
    r = [ratios[m] for m in TAU_MODELS]
    ok = r[0] > r[1] > r[2] > r[3] and rel(r[0], 0.230) <= 0.15
    acceptance_log(10, ok, "M_h/sigma: " + ", ".join(f"{m.split('(')[0]} {v:.4f}" for m, v in ratios.items())
                    + " (ordering, Clayton within 15% of 0.230)")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v", "-s"]))
