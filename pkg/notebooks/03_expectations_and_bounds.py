"""Expectations of nonlinear functions from moment generating functions.

Compares integral representations with seeded Monte-Carlo estimates, then
brackets E ln(1+X) between the reverse-Jensen lower bound and the Jensen
upper bound for a few laws.
"""
import math

import numpy as np

from artifact import expectations as ex

laws = [ex.MgfSpec.exponential(), ex.MgfSpec.gamma(3.0, 2.0), ex.MgfSpec.uniform(0.0, 4.0),
        ex.MgfSpec.poisson(2.0)]

print("law,E_ln1p,mc_mean,mc_se,rji_lower,jensen_upper")
for k, m in enumerate(laws):
    value = ex.expect_ln1p(m)
    mean, se = ex.mc_expectation(m.sample, np.log1p, 10**6, seed=k)
    lower = ex.rji_lower_bound(ex.FnSpec.ln1p(), m, "best")
    print(f"{m.name},{value:.6f},{mean:.6f},{se:.1e},{lower:.6f},{math.log1p(m.mean):.6f}")

print()
print("dimension,cauchy_entropy")
for n in (1, 2, 3, 5):
    print(f"{n},{ex.cauchy_entropy(n):.8f}")

print()
print("snr,simo_capacity_L1,simo_capacity_L4,variance_L1,variance_L4")
for snr in (0.1, 1.0, 10.0):
    print(f"{snr},{ex.simo_capacity(snr, [1.0]):.6f},{ex.simo_capacity(snr, [0.25] * 4):.6f},"
          f"{ex.simo_capacity_variance(snr, [1.0]):.6f},{ex.simo_capacity_variance(snr, [0.25] * 4):.6f}")
