"""
A fair coin tested with a hundred million tosses
================================================

52,263,470 successes in 104,490,000 trials.  The LRT p-value is tiny, yet
the Bayesian test with a Jeffreys prior on the proportion prefers the
fair coin.
"""

import numpy as np

from caketest.binomial import (
    binomial_approx, binomial_jeffreys, binomial_lambda, binomial_pvalue, binomial_wald_ci)
from caketest.simulate import Scenario, run_scenario

s, n = 52_263_470, 104_490_000
res = binomial_jeffreys(s, n)
print(f"lambda_Bayes = {res.lambda_bayes:.4f}  ({res.decision.value}, {res.interpretation.label})")
print(f"large-n approximation = {binomial_approx(s, n):.4f}")
print(f"LRT p-value = {binomial_pvalue(s, n):.2e}")
lo, hi = binomial_wald_ci(s, n)
print(f"95% interval for rho: ({lo:.7f}, {hi:.7f})")

# equivalent level of the Bayesian cut-off at this n
print(f"equivalent alpha = {res.equivalent_alpha:.2e}")

# the exact statistic is vectorised, so a whole grid of counts is cheap
dev = np.array([0, 5_000, 10_000, 20_000, 40_000])
print("lambda_Bayes for s = n/2 + dev:", np.round(binomial_lambda(n // 2 + dev, n), 2))

# a small-replicate version of the error-rate experiment at Sprenger scale
scenario = Scenario("binomial", (0.5, 0.5003), (n,), replicates=200, seed=1)
for cell in run_scenario(scenario).cells:
    print(f"rho={cell.truth}: P(prefer H1)={cell.bayes_rate:.3f}  P(LRT rejects)={cell.lrt_rate:.3f}")
