"""
Two samples: one population or two?
====================================

H1 gives each group its own mean and variance, so a difference in spread
alone is evidence against H0.  The desk-scale error-rate curves below use
n0 = n1 = 50.
"""

import numpy as np

from caketest.normal import two_sample
from caketest.simulate import load_scenario, run_scenario

rng = np.random.default_rng(3)
x0 = rng.normal(0.0, 1.0, 50)
for label, x1 in [("same law", rng.normal(0.0, 1.0, 50)),
                  ("shifted mean", rng.normal(1.0, 1.0, 50)),
                  ("wider spread", rng.normal(0.0, 2.5, 50))]:
    r = two_sample(x0, x1)
    print(f"{label:<13} lambda_Bayes = {r.lambda_bayes:8.3f} "
          f"(asymptotic {r.extras['lambda_bayes_asymptotic']:8.3f})  {r.decision.value}")

for name in ("fig3_mean_desk", "fig3_scale_desk", "fig3_sweep_desk"):
    result = run_scenario(load_scenario(name))
    print(f"\n{name}")
    for c in result.cells:
        print(f"  {c.truth_label:<22} n={c.n:<5} bayes={c.bayes_rate:.3f} lrt={c.lrt_rate:.3f}")
