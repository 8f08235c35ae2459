"""Saddle-point estimates next to exact values.

Binomial coefficients, Stirling's formula, hypersphere surfaces and the
Bahadur-Rao tail estimate; each row shows how the ratio estimate/exact
approaches 1 as n grows.
"""
import math

from scipy.stats import binom

from artifact import asymptotics as asy

print("n,binom_ratio,stirling_ratio,sphere_ratio,tail_ratio")
law = asy.LatticeLaw.bernoulli(0.3)
for n in (10, 20, 50, 100, 200, 400):
    b = asy.binomial_count_saddle(n, n // 2).estimate / math.comb(n, n // 2)
    s = math.exp(asy.stirling(n)[1] - math.lgamma(n + 1))
    exact, saddle = asy.hypersphere_surface(n, 1.0)
    t_log, _, _ = asy.bahadur_rao_tail(law, 0.5, n)
    t = math.exp(t_log) / binom.sf(math.ceil(n * 0.5) - 1, n, 0.3)
    print(f"{n},{b:.6f},{s:.6f},{math.exp(saddle - exact):.6f},{t:.6f}")
