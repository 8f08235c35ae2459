"""Closed-form exponents for the binary symmetric channel."""
from __future__ import annotations

import math

from ..types_core import binary_entropy, binary_kl

__all__ = ["gv_distance", "correct_decoding_bsc"]

_LN2 = math.log(2.0)


def gv_distance(R: float, tol: float = 1e-12) -> float:
    """Smaller root ``delta`` in ``[0, 1/2]`` of ``ln 2 - H(delta) = R``.

    Bisection; the returned point satisfies ``|ln 2 - H(delta) - R| <= tol``.
    """
    R = float(R)
    if not (0.0 <= R <= _LN2 + 1e-15):
        raise ValueError(f"rate must lie in [0, ln 2], got {R}")
    if R == 0.0:
        return 0.5
    if R >= _LN2:
        return 0.0
    lo, hi = 0.0, 0.5
    # ln2 - H is decreasing on [0, 1/2]; stop on the function-value criterion
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        g = _LN2 - binary_entropy(mid) - R
        if abs(g) <= tol or hi - lo < 1e-300:
            return mid
        if g > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def correct_decoding_bsc(p: float, R: float) -> float:
    """Correct-decoding exponent of BSC(p) with uniform inputs: ``D(delta_GV(R) || p)``."""
    if not 0.0 < p < 0.5:
        raise ValueError("crossover must lie in (0, 1/2)")
    C = _LN2 - binary_entropy(p)
    if not (C - 1e-12 <= R <= _LN2 + 1e-15):
        raise ValueError(f"rate must lie in [C(p), ln 2] = [{C}, {_LN2}], got {R}")
    d = gv_distance(min(R, _LN2))
    if d >= p:
        return 0.0
    return binary_kl(d, p)
