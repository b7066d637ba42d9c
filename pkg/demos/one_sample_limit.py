"""
One-sample test: finite diffuseness, the limit and the Bartlett trap
====================================================================

Under the cake schedule (g0 = h, g1 = sqrt(h)) the Bayes factor settles
down as h grows.  Using the same g under both hypotheses instead lets
BF01 grow without bound.
"""

import math

import numpy as np

from caketest.cake_core import PriorSettings
from caketest.normal import (
    one_sample, one_sample_equal_g, one_sample_finite_h, one_sample_posteriors)

rng = np.random.default_rng(7)
x = rng.normal(0.4, 1.0, size=30)

limit = one_sample(x)
print(f"limit: lambda_Bayes = {limit.lambda_bayes:.6f}, lambda_LRT = {limit.lambda_lrt:.4f}, "
      f"{limit.decision.value}")

print("\n     h    -2 ln BF01 (cake)    ln BF01 (equal g = h)")
for e in (2, 4, 6, 8, 10, 12):
    h = 10.0 ** e
    cake = -2.0 * one_sample_finite_h(x, 0.0, h)
    flat = one_sample_equal_g(x, 0.0, h)
    print(f"  1e{e:<3} {cake:18.8f} {flat:22.4f}")

# the finite-h path through the public API
res = one_sample(x, settings=PriorSettings(h=1e12))
print(f"\nh = 1e12: lambda_Bayes = {res.lambda_bayes:.6f} "
      f"(limit differs by {abs(res.lambda_bayes - limit.lambda_bayes):.1e})")

# shifting the null value and the data together leaves the test unchanged
shifted = one_sample(x + 5.0, mu0=5.0)
print(f"shift by 5: lambda_Bayes = {shifted.lambda_bayes:.6f}")

# a prior odds of 20 to 1 for H0 raises the bar by 2 ln 20
print(f"needed lambda with prior odds 20: {2 * math.log(20):.2f}")
print("decision with prior odds 20:", one_sample(x, settings=PriorSettings(prior_odds=20.0)).decision.value)

post = one_sample_posteriors(x)
mu = post["H1", "mu"]
print(f"\nposterior of mu under H1: mean {mu.mean():.4f}, sd {math.sqrt(mu.var()):.4f}")
