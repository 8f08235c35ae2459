"""Independent reference values shared by the module tests and the acceptance suite."""
import math

import numpy as np
from scipy import optimize


def random_channels(count, nx, ny, seed, alpha=1.0):
    rng = np.random.default_rng(seed)
    return [rng.dirichlet(np.full(ny, alpha), size=nx) for _ in range(count)]


def uniform_mi(W):
    """``I(P x W)`` for the uniform input, straight from the definition."""
    W = np.asarray(W, dtype=float)
    P = np.full(W.shape[0], 1.0 / W.shape[0])
    Q = P[:, None] * W
    py = Q.sum(axis=0)
    return math.fsum(Q[x, y] * math.log(W[x, y] / py[y]) for x in range(W.shape[0]) for y in range(W.shape[1])
                     if Q[x, y] > 0)


def rate_grid(W, count=10):
    C = uniform_mi(W)
    return np.linspace(0.05 * C, 0.95 * C, count)


def legendre_grid(cgf, A, hi, points=4001):
    """``sup_{0 <= s <= hi} [s A - cgf(s)]`` by a grid scan and a bounded Brent polish."""
    s = np.linspace(0.0, hi, points)
    vals = np.array([t * A - cgf(t) for t in s])
    i = int(np.argmax(vals))
    lo, up = s[max(i - 1, 0)], s[min(i + 1, points - 1)]
    res = optimize.minimize_scalar(lambda t: -(t * A - cgf(t)), bounds=(lo, up), method="bounded",
                                   options={"xatol": 1e-14})
    return max(-res.fun, float(vals[i]))


def bsc_gv_bisection(R):
    """Smaller root of ``ln 2 - H(d) = R`` by plain bisection on ``[0, 1/2]``."""
    def h(d):
        return 0.0 if d == 0 else -d * math.log(d) - (1 - d) * math.log(1 - d)

    lo, hi = 0.0, 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if math.log(2) - h(mid) > R:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def binary_divergence(a, b):
    out = 0.0
    if a > 0:
        out += a * math.log(a / b)
    if a < 1:
        out += (1 - a) * math.log((1 - a) / (1 - b))
    return out
