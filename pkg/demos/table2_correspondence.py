"""
How p-values line up with lambda_Bayes
======================================

The Bayesian cut-off nu ln n corresponds to a p-value that shrinks with n.
Left: the LRT p-value at fixed lambda_Bayes.  Right: the lambda_Bayes that
a fixed p-value buys.
"""

import pathlib

from caketest.cake_core import equivalent_alpha
from caketest.simulate import table2, write_table2_csv

left, right = table2()
ns = (50, 100, 1000)

print("p-value at lambda_Bayes")
for i in range(0, len(left), 3):
    row = left[i:i + 3]
    print(f"  nu={row[0]['nu']} lambda={row[0]['lambda_bayes']:<3}"
          + "".join(f"{r['p_value']:11.2E}" for r in row))

print("\nlambda_Bayes at p-value")
for i in range(0, len(right), 3):
    row = right[i:i + 3]
    print(f"  nu={row[0]['nu']} p={row[0]['p_value']:<7}"
          + "".join(f"{r['lambda_bayes']:8.1f}" for r in row))

print("\nequivalent level of the Bayesian test, nu = 1")
for n in (10, 100, 10_000, 10 ** 8):
    print(f"  n = {n:<10} alpha = {equivalent_alpha(1, n):.2e}")

out = pathlib.Path("demo_output")
out.mkdir(exist_ok=True)
write_table2_csv(out / "table2.csv", left, right)
print(f"\nwrote {out}/table2.csv")
