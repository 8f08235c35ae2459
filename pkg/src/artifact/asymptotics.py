"""Laplace and saddle-point asymptotics with explicit prefactors.

Every estimator returns both the exponential rate and the pre-exponential
factor, so results can be compared against exact counts in the log domain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq
from scipy.special import betaln, gammaln, logsumexp

from .types_core import binary_entropy

__all__ = [
    "ScalarFn",
    "SaddleResult",
    "LatticeLaw",
    "DensityLaw",
    "laplace_interior",
    "laplace_boundary",
    "stirling",
    "binomial_count_saddle",
    "hypersphere_surface",
    "bahadur_rao_tail",
    "legendre_exponent",
    "lattice_code_count",
    "lattice_code_exponent",
    "l1_lattice_count_exact",
    "mixture_redundancy",
    "mixture_redundancy_exact_uniform",
]


def _fd_step(x: float) -> float:
    return 1e-5 * (1.0 + abs(x))


@dataclass(frozen=True)
class ScalarFn:
    """Scalar function with optional analytic derivatives.

    Missing derivatives fall back to centered finite differences with step
    ``1e-5 * (1 + |x|)``.
    """

    evaluate: Callable[[float], float]
    d1: Optional[Callable[[float], float]] = None
    d2: Optional[Callable[[float], float]] = None

    def __call__(self, x: float) -> float:
        return float(self.evaluate(x))

    def first(self, x: float) -> float:
        if self.d1 is not None:
            return float(self.d1(x))
        h = _fd_step(x)
        return (self(x + h) - self(x - h)) / (2 * h)

    def second(self, x: float) -> float:
        if self.d2 is not None:
            return float(self.d2(x))
        if self.d1 is not None:
            h = _fd_step(x)
            return (float(self.d1(x + h)) - float(self.d1(x - h))) / (2 * h)
        h = 1e-4 * (1.0 + abs(x))
        return (self(x + h) - 2 * self(x) + self(x - h)) / h**2


def _as_fn(f) -> ScalarFn:
    return f if isinstance(f, ScalarFn) else ScalarFn(f)


@dataclass(frozen=True)
class SaddleResult:
    """Output of a Laplace or saddle-point estimate.

    ``log_estimate = n * f_at + ln(prefactor)``.
    """

    location: float
    f_at: float
    f_second: float
    prefactor: float
    log_estimate: float
    mode: str

    @property
    def estimate(self) -> float:
        return math.exp(self.log_estimate) if self.log_estimate < 709 else math.inf


def _result(x0, f0, f2, pref, n, mode) -> SaddleResult:
    return SaddleResult(float(x0), float(f0), float(f2), float(pref),
                        float(n * f0 + math.log(pref)), mode)


def _stationary_point(fn: ScalarFn, lo: float, hi: float) -> float:
    """Root of ``f'`` in ``[lo, hi]``: Brent bracketing, then Newton polish."""
    a, b = fn.first(lo), fn.first(hi)
    if not np.isfinite(a) or not np.isfinite(b) or a * b > 0:
        raise ValueError(f"f' has no sign change on [{lo}, {hi}]")
    x = brentq(fn.first, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    for _ in range(3):
        g, h = fn.first(x), fn.second(x)
        if g == 0 or h == 0:
            break
        step = g / h
        xn = x - step
        if not lo <= xn <= hi or abs(fn.first(xn)) >= abs(g):
            break
        x = xn
    return x


def laplace_interior(f, g, n: int, bracket: tuple[float, float]) -> SaddleResult:
    """Laplace estimate of ``int g(x) exp(n f(x)) dx`` around an interior max.

    Returns ``g(x0) exp(n f(x0)) sqrt(2 pi / (n |f''(x0)|))``.

    Parameters
    ----------
    f, g : ScalarFn or callable
        Exponent and (positive) amplitude.
    n : int
        Large parameter.
    bracket : tuple
        Interval on which ``f'`` changes sign exactly once.
    """
    fn, gn = _as_fn(f), _as_fn(g)
    x0 = _stationary_point(fn, *bracket)
    f2 = fn.second(x0)
    if not f2 < 0:
        raise ValueError(f"f''(x0) = {f2} is not negative; not a maximum")
    g0 = gn(x0)
    if not g0 > 0:
        raise ValueError("amplitude g must be positive at the maximum")
    pref = g0 * math.sqrt(2 * math.pi / (n * abs(f2)))
    return _result(x0, fn(x0), f2, pref, n, "interior")


def laplace_boundary(f, n: int, endpoint: float, side: str) -> SaddleResult:
    """Laplace estimate of ``int exp(n f(x)) dx`` when the max sits on an endpoint.

    ``side="left"`` means the domain is ``[endpoint, ...)``; ``"right"``
    means ``(..., endpoint]``. With a nonzero slope the estimate is
    ``exp(n f) / (n |f'|)``. A flat endpoint switches to the half-Gaussian
    ``exp(n f) * sqrt(2 pi / (n |f''|)) / 2``.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    fn = _as_fn(f)
    f0, f1, f2 = fn(endpoint), fn.first(endpoint), fn.second(endpoint)
    flat_tol = 1e-10 if fn.d1 is not None else 1e-7
    if abs(f1) <= flat_tol * (1 + abs(f2)):
        if not f2 < 0:
            raise ValueError("flat endpoint with f'' >= 0 is not a maximum")
        pref = 0.5 * math.sqrt(2 * math.pi / (n * abs(f2)))
        return _result(endpoint, f0, f2, pref, n, "boundary")
    inward = f1 < 0 if side == "left" else f1 > 0
    if not inward:
        raise ValueError(f"slope f'={f1} increases into the domain; endpoint is not a max")
    return _result(endpoint, f0, f2, 1.0 / (n * abs(f1)), n, "boundary")


def stirling(n: int) -> tuple[float, float]:
    """Stirling's ``(n/e)^n sqrt(2 pi n)`` and its logarithm."""
    if n < 1:
        raise ValueError("stirling needs n >= 1")
    log_approx = n * (math.log(n) - 1) + 0.5 * math.log(2 * math.pi * n)
    approx = math.exp(log_approx) if log_approx < 709 else math.inf
    return approx, log_approx


def binomial_count_saddle(n: int, k: int) -> SaddleResult:
    """Saddle-point estimate of ``C(n, k)`` from the generating function ``(1+z)^n``.

    The saddle sits at ``z0 = q/(1-q)`` with ``q = k/n``; the estimate is
    ``exp(n H(q)) / sqrt(2 pi n q (1-q))``. ``f_second`` is the curvature of
    ``ln(1+z) - q ln z`` along the real axis (positive, vertical-line saddle).
    """
    if not 0 < k < n:
        raise ValueError("binomial_count_saddle needs 0 < k < n; C(n,0)=C(n,n)=1 exactly")
    q = k / n
    z0 = q / (1 - q)
    f2 = (1 - q) ** 3 / q
    pref = 1.0 / math.sqrt(2 * math.pi * n * q * (1 - q))
    return _result(z0, binary_entropy(q), f2, pref, n, "interior")


def hypersphere_surface(n: int, s: float) -> tuple[float, float]:
    """Log surface area of the sphere of radius ``sqrt(n s)`` in ``R^n``.

    Returns ``(exact_log, saddle_log)`` where the saddle estimate is
    ``(2 pi e s)^(n/2) / sqrt(pi s)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not s > 0:
        raise ValueError("s must be positive")
    exact = math.log(2) + 0.5 * n * math.log(math.pi) + 0.5 * (n - 1) * math.log(n * s) - gammaln(n / 2)
    saddle = 0.5 * n * math.log(2 * math.pi * math.e * s) - 0.5 * math.log(math.pi * s)
    return float(exact), float(saddle)


# ---------------------------------------------------------------------------
# IID sums: Bahadur-Rao tail
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LatticeLaw:
    """Law on the lattice ``offset + delta * i``, ``i = 0..len(weights)-1``."""

    delta: float
    weights: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if self.delta <= 0 or w.ndim != 1 or np.any(w < 0) or abs(w.sum() - 1) > 1e-9:
            raise ValueError("LatticeLaw needs delta > 0 and a probability vector")
        object.__setattr__(self, "weights", w)

    @classmethod
    def bernoulli(cls, p: float) -> "LatticeLaw":
        return cls(1.0, np.array([1 - p, p]))

    @property
    def values(self) -> np.ndarray:
        return self.offset + self.delta * np.arange(self.weights.size)

    @property
    def mean(self) -> float:
        return float(self.weights @ self.values)

    @property
    def sup(self) -> float:
        return float(self.values[np.flatnonzero(self.weights > 0)[-1]])

    def _tilted(self, s: float) -> np.ndarray:
        on = self.weights > 0
        lw = np.full(self.weights.size, -np.inf)
        lw[on] = np.log(self.weights[on]) + s * self.values[on]
        return np.exp(lw - logsumexp(lw))

    def cgf(self, s: float) -> float:
        on = self.weights > 0
        return float(logsumexp(np.log(self.weights[on]) + s * self.values[on]))

    def cgf1(self, s: float) -> float:
        return float(self._tilted(s) @ self.values)

    def cgf2(self, s: float) -> float:
        t = self._tilted(s)
        m = t @ self.values
        return float(t @ (self.values - m) ** 2)


@dataclass(frozen=True)
class DensityLaw:
    """Non-lattice law given by its cumulant generating function ``ln M(s)``.

    ``s_max`` bounds the region where the CGF is finite; ``sup`` is the
    essential supremum (``inf`` if unbounded).
    """

    cgf: Callable[[float], float]
    mean: float
    s_max: float = math.inf
    sup: float = math.inf
    cgf1: Optional[Callable[[float], float]] = None
    cgf2: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        fn = ScalarFn(self.cgf, self.cgf1, self.cgf2)
        object.__setattr__(self, "_fn", fn)

    def d1(self, s: float) -> float:
        return self._fn.first(s)

    def d2(self, s: float) -> float:
        return self._fn.second(s)


def _law_derivs(law):
    if isinstance(law, LatticeLaw):
        return law.cgf, law.cgf1, law.cgf2
    return law.cgf, law.d1, law.d2


def _tilt_root(law, A: float) -> float:
    """Solve ``K'(s) = A`` for ``s > 0``."""
    _, k1, _ = _law_derivs(law)
    s_cap = law.s_max if isinstance(law, DensityLaw) else math.inf
    hi = 1.0
    while k1(hi) < A:
        hi *= 2
        if hi >= s_cap or hi > 1e6:
            if hi >= s_cap:
                hi = s_cap * (1 - 1e-12)
                if k1(hi) >= A:
                    break
            raise ValueError(f"tilting root for A={A} is not bracketed")
    return brentq(lambda s: k1(s) - A, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def legendre_exponent(law, A: float) -> tuple[float, float]:
    """``sup_s [s A - ln M(s)]`` over ``s >= 0`` and its maximizer."""
    k, _, _ = _law_derivs(law)
    s = _tilt_root(law, A)
    return float(s * A - k(s)), float(s)


def bahadur_rao_tail(law, A: float, n: int) -> tuple[float, float, float]:
    """Exact-prefactor estimate of ``Pr{X_1 + ... + X_n >= n A}``.

    Parameters
    ----------
    law : LatticeLaw or DensityLaw
        Summand law. Lattice laws get the oscillating lattice prefactor.
    A : float
        Threshold per summand, strictly between the mean and the supremum.
    n : int
        Number of summands.

    Returns
    -------
    log_prob, exponent, prefactor : float
        ``log_prob = -n * exponent + ln(prefactor)``.
    """
    if A <= law.mean:
        raise ValueError(f"A={A} is not above the mean {law.mean}; no large-deviations tail")
    if A >= law.sup:
        raise ValueError(f"A={A} is not below the essential supremum {law.sup}")
    exponent, s = legendre_exponent(law, A)
    _, _, k2 = _law_derivs(law)
    V = k2(s)
    gauss = math.sqrt(2 * math.pi * n * V)
    if isinstance(law, LatticeLaw):
        d = law.delta
        gap = math.fmod(n * law.offset - n * A, d)
        if gap < 0:
            gap += d
        if min(gap, d - gap) <= 1e-9 * max(1.0, abs(n * A)):
            gap = 0.0
        pref = d * math.exp(-s * gap) / (-math.expm1(-s * d) * gauss)
    else:
        pref = 1.0 / (s * gauss)
    return -n * exponent + math.log(pref), exponent, pref


# ---------------------------------------------------------------------------
# L1 lattice code counting
# ---------------------------------------------------------------------------


def lattice_code_exponent(delta: float, Q: float) -> tuple[float, float, float]:
    """``(s*, f(s*), f''(s*))`` for ``f(s) = Q s - ln tanh(delta s / 2)``."""
    if delta <= 0 or Q <= 0:
        raise ValueError("delta and Q must be positive")
    r = delta / Q
    s = math.asinh(r) / delta
    f = Q * s - math.log(math.tanh(delta * s / 2))
    f2 = Q**2 * math.sqrt(1 + r * r)
    return s, f, f2


def lattice_code_count(delta: float, Q: float, n: int) -> tuple[float, float]:
    """Saddle-point log-count of ``{k in Z^n : delta * sum |k_i| <= n Q}``.

    Returns ``(log_count, rate)`` with ``rate = log_count / n``. The count
    carries the lattice prefactor with the ``(n Q) mod delta`` offset.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    s, f, f2 = lattice_code_exponent(delta, Q)
    gap = math.fmod(n * Q, delta)
    if min(gap, delta - gap) <= 1e-9 * max(1.0, n * Q):
        gap = 0.0
    log_pref = (math.log(delta) - s * gap - math.log(-math.expm1(-s * delta))
                - 0.5 * math.log(2 * math.pi * n * f2))
    log_count = n * f + log_pref
    return log_count, log_count / n


def l1_lattice_count_exact(n: int, L: int) -> int:
    """Number of integer vectors in ``Z^n`` with ``sum |k_i| <= L`` (exact)."""
    ways = [1] + [0] * L
    for _ in range(n):
        new = [0] * (L + 1)
        for t, w in enumerate(ways):
            if w:
                new[t] += w
                for j in range(1, L - t + 1):
                    new[t + j] += 2 * w
        ways = new
    return sum(ways)


# ---------------------------------------------------------------------------
# Universal coding redundancy
# ---------------------------------------------------------------------------


def mixture_redundancy(n: int, n1: int, prior=None) -> float:
    """Per-symbol code length of the mixture code for a binary sequence.

    ``H(q) + ln n / (2n) - ln[w(q) sqrt(2 pi q (1-q))] / n`` with ``q = n1/n``
    and prior density ``w`` (uniform when omitted).
    """
    if not 0 < n1 < n:
        raise ValueError("mixture_redundancy needs 0 < n1 < n")
    w = (lambda _q: 1.0) if prior is None else prior
    q = n1 / n
    wq = float(w(q))
    if not wq > 0:
        raise ValueError("prior density must be positive at q")
    return binary_entropy(q) + math.log(n) / (2 * n) - math.log(wq * math.sqrt(2 * math.pi * q * (1 - q))) / n


def mixture_redundancy_exact_uniform(n: int, n1: int) -> float:
    """Exact ``-ln B(n1+1, n-n1+1) / n`` for the uniform prior."""
    if not 0 <= n1 <= n:
        raise ValueError("need 0 <= n1 <= n")
    return float(-betaln(n1 + 1, n - n1 + 1) / n)
