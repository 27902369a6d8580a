"""Test whether a sample comes from an extreme-value copula.

Two samples of size 200 are tested: one from a Gumbel copula, which is an
extreme-value copula, and one from a Clayton copula, which is not.  The
p-value comes from 200 multiplier-bootstrap replicates.
"""

from pickands import TestConfig, from_name, run_test

cfg = TestConfig(B=200, seed=3)
print(f"weight {cfg.weight.label()}, gamma {cfg.gamma}, B {cfg.B}\n")
for name in ("gumbel(rho=0.5)", "clayton(tau=0.5)"):
    C = from_name(name)
    rep = run_test(C.sample(200, seed=11), cfg)
    verdict = "reject" if rep.reject else "keep"
    print(f"{name:>18}: statistic {rep.statistic:.4f}, 95% bootstrap quantile {rep.critical_value:.4f}, "
          f"p = {rep.p_value:.3f} -> {verdict} ({rep.seconds:.2f} s)")
