"""Error exponents of a binary symmetric channel, side by side.

Prints a CSV table of the random-coding, sphere-packing, expurgated and
correct-decoding exponents of BSC(0.1) with uniform inputs, plus the dual
lower bound and the joint-type grid value of the random-coding exponent.
Pipe the output into any plotting tool.
"""
import math

import numpy as np

from artifact.exponents import (
    correct_decoding_exponent,
    critical_rate,
    dual_rc_optimize,
    expurgated_exponent,
    rc_exponent,
    rc_grid_curve,
    sp_exponent,
)

p = 0.1
W = np.array([[1 - p, p], [p, 1 - p]])
P = np.array([0.5, 0.5])
C = math.log(2) + p * math.log(p) + (1 - p) * math.log(1 - p)
print(f"# capacity {C:.6f} nats, critical rate {critical_rate(W, P):.6f} nats")

rates = np.linspace(0.0, math.log(2) * 0.999, 15)
grid, _ = rc_grid_curve(W, P, rates, denom=200)
print("rate,rc,rc_dual,rc_grid,sp,ex,cd")
for R, g in zip(rates, grid):
    row = [rc_exponent(W, P, R).value, dual_rc_optimize(W, P, R)[1], g,
           sp_exponent(W, P, R).value if R > 0 else math.nan,
           expurgated_exponent(W, P, R).value,
           correct_decoding_exponent(W, P, R).value]
    print(",".join(f"{v:.6f}" for v in [R, *row]))
