"""How far are common copulas from the extreme-value class?

For each non-extreme-value copula with Kendall's tau 0.5 we compute the
best extreme-value approximation A*, the weighted L2 distance M_h to it,
and the ratio M_h / sigma that drives the asymptotic power of the test.
The t4 entry takes about a minute.
"""

import numpy as np

from pickands import WeightSpec, best_approx, from_name, min_distance, power_approximation

w = WeightSpec.hk(0.4, 0.02)
t = np.array([0.25, 0.5, 0.75])
print(f"weight {w.label()}\n")
print(f"{'model':>18} {'A*(.25)':>8} {'A*(.5)':>8} {'A*(.75)':>8} {'M_h':>10} {'M_h/sigma':>10} {'power n=200':>12}")
for name in ("gumbel(tau=0.5)", "clayton(tau=0.5)", "frank(tau=0.5)", "gaussian(tau=0.5)", "t4(tau=0.5)"):
    C = from_name(name)
    a = best_approx(C, w, t)
    pa = power_approximation(C, w, n=200)
    ratio = f"{pa.ratio:10.4f}" if pa.ratio else f"{'-':>10}"
    power = f"{pa.power:12.3f}" if pa.ratio else f"{'-':>12}"
    print(f"{name:>18} {a[0]:8.4f} {a[1]:8.4f} {a[2]:8.4f} {min_distance(C, w):10.3e} {ratio} {power}")
