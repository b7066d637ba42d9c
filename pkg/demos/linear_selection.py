"""
Regression: BIC as a limiting Bayes factor
==========================================

Cake priors on the intercept and the coefficients turn -2 ln BF01 into the
BIC difference as h grows.  Standardizing first makes every number free of
the units the covariates were measured in.
"""

import numpy as np

from caketest.cake_core import PriorSettings
from caketest.linear_model import (
    bf01_finite_h, bic, enumerate_models, linear_posteriors, linear_test,
    select_model, standardize)

rng = np.random.default_rng(11)
n = 200
X = rng.standard_normal((n, 4))
X[:, 1] *= 1000.0  # measured in different units
y = 3.0 + 0.8 * X[:, 0] + 0.0005 * X[:, 1] + rng.standard_normal(n)
data = standardize(y, X, names=["dose", "weight", "noise1", "noise2"])

print("top five models by BIC")
for row in select_model(data, enumerate_models(data.p))[:5]:
    print(f"  {row['gamma']}  BIC = {row['bic']:9.3f}  R2 = {row['r2']:.3f}")

res = linear_test(data, "1000", "1100")
print(f"\n'1000' vs '1100': lambda_Bayes = {res.lambda_bayes:.4f} ({res.decision.value})")

print("\nconvergence of -2 ln BF01(h) to BIC0 - BIC1")
target = bic(data, "1000") - bic(data, "1100")
for e in (6, 12, 20, 30):
    gap = -2.0 * bf01_finite_h(data, "1000", "1100", 10.0 ** e) - target
    print(f"  h = 1e{e:<3} gap = {gap:.2e}")

fin = linear_test(data, "1000", "1100", PriorSettings(h=1e8))
print(f"\nh = 1e8 through the test API: lambda_Bayes = {fin.lambda_bayes:.4f}")

post = linear_posteriors(data, "1100")
beta = post["H", "beta"]
print("posterior mean of standardized slopes:", np.round(beta.mean(), 4))
icpt, slopes = data.raw_coefficients(beta.mean(), "1100")
print(f"raw scale: intercept {icpt:.3f}, slopes {np.round(slopes, 5)}")
