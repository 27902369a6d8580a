"""Variance-optimal weights versus the h_k family.

At a fixed t the asymptotic variance of the minimum-distance estimator is
a quadratic form in the weight.  We minimise it over discrete weights on
100 cells and compare with discretised h_k weights.
"""

import numpy as np

from pickands import optimal_weight
from pickands.approximation import asymptotic_variance_hk, hk_discrete, variance_functional
from pickands.copulas import Copula, from_name

for C in (Copula("independence"), from_name("gumbel(2)")):
    print(f"model {C}")
    for t in (0.25, 0.5):
        res = optimal_weight(C, t, N=100)
        top = np.argsort(res.masses)[::-1][:3]
        atoms = ", ".join(f"{res.grid[i]:.3f}:{res.masses[i]:.2f}" for i in top)
        print(f"  t={t}: optimal V {res.V:.5f} (KKT residual {res.residual:.1e}); heaviest atoms {atoms}")
        for k in (0.0, 0.4, 1.0, 5.0):
            Vd = variance_functional(C, t, hk_discrete(k, 100))
            Vc = asymptotic_variance_hk(C, t, k)
            print(f"    h_{k:<3g} discretised V {Vd:.5f}   continuous V {Vc:.5f}")
