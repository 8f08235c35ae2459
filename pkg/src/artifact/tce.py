"""Asymptotics of type-class enumerators.

A type-class enumerator counts how many of ``~exp(nA)`` independent
codewords land in a joint type of probability ``~exp(-nB)``, so it is
binomial with exponentially growing trials and exponentially small success
probability. The exponents below are the large-``n`` limits of its tails,
moments and joint tail events; :func:`exact_binomial_moment` is the
finite-size oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import logsumexp
from scipy.stats import binom

from .types_core import binary_kl

__all__ = [
    "TceParams",
    "PhaseBoundaryError",
    "tail_upper_exponent",
    "tail_lower_exponent",
    "moment_exponent",
    "intersection_indicator",
    "kl_asymptotic",
    "exact_binomial_moment",
    "log_exact_binomial_moment",
    "binomial_tail_upper",
]

_BOUNDARY_TOL = 1e-12


class PhaseBoundaryError(ValueError):
    """Parameters sit on a phase boundary that the asymptotic statements exclude."""


@dataclass(frozen=True)
class TceParams:
    """Trials ``~exp(nA)``, success probability ``~exp(-nB)``."""

    A: float
    B: float

    def __post_init__(self):
        if not (math.isfinite(self.A) and math.isfinite(self.B)) or self.A < 0 or self.B < 0:
            raise ValueError(f"A and B must be finite and nonnegative, got {self.A}, {self.B}")


def _check_lambda(p: TceParams, lam: float) -> None:
    if abs(lam - (p.A - p.B)) <= _BOUNDARY_TOL * (1 + abs(lam)):
        raise PhaseBoundaryError(f"lambda={lam} equals A-B; the tail exponent is not defined there")


def tail_upper_exponent(p: TceParams, lam: float) -> float:
    """Exponent of ``Pr{N >= exp(n lam)}``.

    ``[B-A]_+`` when ``[A-B]_+ >= lam`` and ``+inf`` otherwise.
    """
    _check_lambda(p, lam)
    return max(p.B - p.A, 0.0) if max(p.A - p.B, 0.0) >= lam else math.inf


def tail_lower_exponent(p: TceParams, lam: float) -> float:
    """Exponent of ``Pr{N <= exp(n lam)}``: 0 if ``A-B < lam``, ``+inf`` if ``A-B > lam``."""
    _check_lambda(p, lam)
    return 0.0 if p.A - p.B < lam else math.inf


def moment_exponent(p: TceParams, s: float) -> float:
    """Exponential order of ``E[N^s]``.

    ``(A-B) s`` in the populated regime ``A > B``; ``-(B-A)`` for ``A < B``,
    where the moment no longer depends on ``s``.
    """
    if not s > 0:
        raise ValueError("s must be positive")
    if abs(p.A - p.B) <= _BOUNDARY_TOL * (1 + p.A):
        raise PhaseBoundaryError("A = B is excluded (Poisson-like regime)")
    return (p.A - p.B) * s if p.A > p.B else -(p.B - p.A)


def intersection_indicator(params: Sequence[TceParams], lam: float) -> int:
    """Exponential-scale probability of ``prod_j {N_j <= exp(n lam)}``.

    Returns 1 iff ``min_j (B_j - A_j + [lam]_+) > 0``; an empty list gives 1.
    """
    for p in params:
        _check_lambda(p, lam)
    if not params:
        return 1
    lp = max(lam, 0.0)
    return int(min(p.B - p.A + lp for p in params) > 0)


def kl_asymptotic(a: float, b: float) -> tuple[float, str]:
    """Asymptotic surrogate for the binary divergence ``D(a||b)``.

    ``b`` when ``a << b`` and ``a ln(a/b)`` when ``a >> b``; comparable
    arguments (ratio within ``[0.1, 10]``) fall back to the exact value.

    Returns
    -------
    value : float
    regime : {"a<<b", "a>>b", "neither"}
    """
    if not (0 < a < 1 and 0 < b < 1):
        raise ValueError("a and b must lie in (0, 1)")
    r = a / b
    if r < 0.1:
        return b, "a<<b"
    if r > 10:
        return a * math.log(r), "a>>b"
    return binary_kl(a, b), "neither"


def _binom_support(m: int, p: float) -> np.ndarray:
    """Integers carrying all binomial mass above ~1e-300."""
    mean = m * p
    sd = math.sqrt(max(mean * (1 - p), 0.0))
    half = 40 * sd + 60 + 0.5 * min(m, 700)
    lo = max(0, int(mean - half))
    hi = min(m, int(mean + half) + 1)
    return np.arange(lo, hi + 1, dtype=float)


def _binom_logpmf(k: np.ndarray, m: int, p: float) -> np.ndarray:
    # scipy's pmf avoids the ~1e-11 cancellation of the log-gamma route at
    # m ~ 1e4; terms below 1e-300 underflow and are truncated by the caller
    with np.errstate(divide="ignore"):
        return np.log(binom.pmf(k, m, p))


def log_exact_binomial_moment(m: int, p: float, s: float) -> float:
    """``ln E[N^s]`` for ``N ~ Binomial(m, p)`` by log-domain summation."""
    if m != int(m) or m < 0:
        raise ValueError("m must be a nonnegative integer")
    if m > 10**7:
        raise OverflowError("m exceeds the 1e7 summation guard")
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    m = int(m)
    k = _binom_support(m, p)
    lp = _binom_logpmf(k, m, p)
    keep = lp > math.log(1e-300)
    k, lp = k[keep], lp[keep]
    if s == 0:
        return float(logsumexp(lp))
    pos = k > 0
    if not np.any(pos):
        return -math.inf
    return float(logsumexp(lp[pos] + s * np.log(k[pos])))


def exact_binomial_moment(m: int, p: float, s: float) -> float:
    """``E[N^s]`` for ``N ~ Binomial(m, p)``, ``pmf < 1e-300`` truncated."""
    v = log_exact_binomial_moment(m, p, s)
    if v > 709:
        raise OverflowError("moment overflows double precision; use log_exact_binomial_moment")
    return math.exp(v)


def binomial_tail_upper(m: int, p: float, r: int) -> float:
    """Exact ``Pr{N >= r}`` for ``N ~ Binomial(m, p)``."""
    return float(binom.sf(r - 1, m, p))
