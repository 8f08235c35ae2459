"""Volume exponents of Gaussian, Gauss-Markov and exponential-family type classes.

A type class of continuous sequences is the set sharing (approximately) the
same sufficient statistics. Its volume grows like ``exp(n h)``, where ``h``
is the differential entropy of the maximum-entropy law with those
statistics. The event exponents at the end of the module combine these
volumes with the density inside each class.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, linalg, optimize
from scipy.special import gammaln

__all__ = [
    "GaussianTypeSpec",
    "ArSpec",
    "ExpFamily",
    "MaxentError",
    "gaussian_volume_exponent",
    "refined_volume_exponent",
    "conditional_volume_exponent",
    "mmse_from_covariance",
    "yule_walker",
    "gm_volume_exponent",
    "kolmogorov_szego_entropy",
    "maxent_solve",
    "log_partition",
    "generalized_gaussian_entropy",
    "gaussian_ld_exponent",
    "quadratic_event_exponent",
    "autocorr_event_exponent",
    "mixed_stat_event_exponent",
]

_HALF_LOG_2PIE = 0.5 * math.log(2 * math.pi * math.e)


def gaussian_volume_exponent(s: float) -> float:
    """Volume exponent ``0.5 ln(2 pi e s)`` of the power-``s`` Gaussian type."""
    if not s > 0:
        raise ValueError("power s must be positive")
    return _HALF_LOG_2PIE + 0.5 * math.log(s)


def refined_volume_exponent(s: float, mu: float) -> float:
    """Exponent ``0.5 ln(2 pi e (s - mu^2))`` when the empirical mean is fixed too."""
    v = s - mu * mu
    if not v > 0:
        raise ValueError(f"need s > mu^2, got s={s}, mu={mu}")
    return _HALF_LOG_2PIE + 0.5 * math.log(v)


def _check_pd(a: np.ndarray, name: str) -> np.ndarray:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.shape[0] != a.shape[1] or not np.allclose(a, a.T, atol=1e-12):
        raise ValueError(f"{name} must be a symmetric square matrix")
    try:
        np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        raise ValueError(f"{name} is not positive definite") from None
    return a


def mmse_from_covariance(full: np.ndarray, sub: np.ndarray) -> float:
    """Linear MMSE of ``X`` from ``Y_1..Y_k`` as ``det(full) / det(sub)``.

    ``full`` is the covariance of ``(X, Y_1, ..., Y_k)`` and ``sub`` its
    trailing ``k x k`` block.
    """
    full = _check_pd(full, "full covariance")
    sub = _check_pd(sub, "conditioning covariance")
    if full.shape[0] != sub.shape[0] + 1 or not np.allclose(full[1:, 1:], sub):
        raise ValueError("full must be sub bordered by the X row and column")
    return float(np.exp(np.linalg.slogdet(full)[1] - np.linalg.slogdet(sub)[1]))


@dataclass(frozen=True, eq=False)
class GaussianTypeSpec:
    """Empirical second-order statistics of a Gaussian (conditional) type.

    Attributes
    ----------
    s : float
        Empirical power of ``x``.
    mu : float, optional
        Empirical mean; the variance about it is ``s - mu^2``.
    c : array, optional
        Empirical correlations between ``x`` and each conditioning vector.
    gram : array, optional
        Gram matrix (powers and cross-correlations) of the conditioning
        vectors. A scalar is read as ``P_y`` of a single conditioner.
    """

    s: float
    mu: Optional[float] = None
    c: Optional[np.ndarray] = None
    gram: Optional[np.ndarray] = None

    def covariance(self) -> tuple[np.ndarray, Optional[np.ndarray]]:
        var = self.s - (self.mu or 0.0) ** 2
        if self.c is None:
            return np.array([[var]]), None
        c = np.atleast_1d(np.asarray(self.c, dtype=float))
        g = np.atleast_2d(np.asarray(self.gram, dtype=float))
        full = np.block([[np.array([[var]]), c[None, :]], [c[:, None], g]])
        return full, g


def conditional_volume_exponent(spec: GaussianTypeSpec) -> float:
    """``0.5 ln(2 pi e MMSE)`` for a conditional Gaussian type."""
    full, sub = spec.covariance()
    if sub is None:
        if not full[0, 0] > 0:
            raise ValueError("type variance must be positive")
        return _HALF_LOG_2PIE + 0.5 * math.log(full[0, 0])
    return _HALF_LOG_2PIE + 0.5 * math.log(mmse_from_covariance(full, sub))


@dataclass(frozen=True, eq=False)
class ArSpec:
    """Autoregressive model fitted to autocorrelations ``s_0..s_k``."""

    autocorrs: np.ndarray
    coeffs: np.ndarray
    sigma2: float

    def spectrum(self, w: np.ndarray) -> np.ndarray:
        k = np.arange(1, self.coeffs.size + 1)
        a = 1 - np.exp(-1j * np.multiply.outer(w, k)) @ self.coeffs
        return self.sigma2 / np.abs(a) ** 2


def yule_walker(autocorrs: Sequence[float]) -> ArSpec:
    """Solve ``sum_i a_i s_|i-j| = s_j`` and ``sigma^2 = s_0 - sum_i a_i s_i``."""
    s = np.asarray(autocorrs, dtype=float)
    if s.ndim != 1 or s.size < 1:
        raise ValueError("need autocorrelations (s_0, ..., s_k)")
    _check_pd(linalg.toeplitz(s), "Toeplitz autocorrelation matrix")
    if s.size == 1:
        return ArSpec(s, np.zeros(0), float(s[0]))
    a = linalg.solve_toeplitz(s[:-1], s[1:])
    sigma2 = float(s[0] - a @ s[1:])
    return ArSpec(s, a, sigma2)


def gm_volume_exponent(ar: ArSpec) -> float:
    """Gauss-Markov type volume exponent ``0.5 ln(2 pi e sigma^2)``."""
    if not ar.sigma2 > 0:
        raise ValueError("innovation variance must be positive")
    return _HALF_LOG_2PIE + 0.5 * math.log(ar.sigma2)


def kolmogorov_szego_entropy(ar: ArSpec) -> float:
    """Entropy rate ``0.5 ln(2 pi e) + (1/4pi) int ln S(w) dw`` by quadrature."""
    val, _ = integrate.quad(lambda w: math.log(ar.spectrum(np.array([w]))[0]), -math.pi, math.pi,
                            epsabs=1e-13, epsrel=1e-12, limit=200)
    return _HALF_LOG_2PIE + val / (4 * math.pi)


# ---------------------------------------------------------------------------
# Exponential families and the max-entropy dual
# ---------------------------------------------------------------------------


class MaxentError(RuntimeError):
    """Raised when the max-entropy Newton iteration does not converge."""

    def __init__(self, msg: str, residual: float):
        super().__init__(f"{msg} (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True, eq=False)
class ExpFamily:
    """Family ``exp(theta . phi(x)) / Z(theta)`` on an interval or a finite grid.

    Attributes
    ----------
    statistics : list of callables
        Vectorized statistics ``phi_j``.
    domain : tuple or array
        ``(lo, hi)`` interval (infinite ends allowed) or an array of atoms.
    breakpoints : tuple
        Interior points where statistics are not smooth; quadrature splits there.
    """

    statistics: Sequence[Callable[[np.ndarray], np.ndarray]]
    domain: object = (-math.inf, math.inf)
    breakpoints: tuple = (0.0,)
    tol: float = 1e-10

    @property
    def dim(self) -> int:
        return len(self.statistics)

    @property
    def discrete(self) -> bool:
        return not (isinstance(self.domain, tuple) and len(self.domain) == 2)

    def phi(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.stack([np.broadcast_to(np.asarray(f(x), dtype=float), x.shape) for f in self.statistics], axis=-1)

    def _pieces(self, extra=()) -> list[tuple[float, float]]:
        lo, hi = self.domain
        inner = sorted({b for b in (*self.breakpoints, *extra) if lo < b < hi})
        cuts = [lo] + inner + [hi]
        return [(a, b) for a, b in zip(cuts[:-1], cuts[1:]) if b > a]

    def moments(self, theta: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
        """``ln Z``, mean and covariance of ``phi`` under ``P_theta``."""
        theta = np.asarray(theta, dtype=float)
        if self.discrete:
            x = np.asarray(self.domain, dtype=float)
            ph = self.phi(x)
            e = ph @ theta
            m = e.max()
            w = np.exp(e - m)
            z = w.sum()
            p = w / z
            mean = p @ ph
            cov = (ph - mean).T @ ((ph - mean) * p[:, None])
            return float(m + math.log(z)), mean, cov
        shift, modes = self._log_peak(theta)
        d = self.dim

        def integrand(x):
            ph = self.phi(np.array([x]))[0]
            e = ph @ theta - shift
            w = math.exp(e) if e > -745 else 0.0
            return w * np.concatenate(([1.0], ph, np.outer(ph, ph).ravel()))

        vals = np.zeros(1 + d + d * d)
        for a, b in self._pieces(modes):
            v, _ = integrate.quad_vec(integrand, a, b, epsabs=self.tol * 1e-2, epsrel=1e-12, limit=2000)
            vals += v
        z = vals[0]
        if not (z > 0 and np.isfinite(z)):
            raise OverflowError("partition function is not finite at this theta")
        mean = vals[1:1 + d] / z
        second = vals[1 + d:].reshape(d, d) / z
        return float(shift + math.log(z)), mean, second - np.outer(mean, mean)

    def _log_peak(self, theta: np.ndarray) -> tuple[float, list]:
        """Peak of ``theta . phi`` on a probe grid and the local-max locations."""
        lo, hi = self.domain
        a = lo if np.isfinite(lo) else -60.0
        b = hi if np.isfinite(hi) else 60.0
        grid = np.linspace(a, b, 4001)
        e = self.phi(grid) @ theta
        if not np.isfinite(hi) and e[-1] >= e[-2]:
            raise OverflowError("exp(theta . phi) grows at +inf; Z diverges")
        if not np.isfinite(lo) and e[0] >= e[1]:
            raise OverflowError("exp(theta . phi) grows at -inf; Z diverges")
        # far tails: a slowly growing term (e.g. a tiny positive x^2 weight)
        # only shows up well beyond the probe grid
        far = 10.0 ** np.arange(2, 9)
        for end, sign in ((hi, 1.0), (lo, -1.0)):
            if np.isfinite(end):
                continue
            et = self.phi(sign * far) @ theta
            if np.any(np.diff(et) >= 0) or et[-1] > e.max() - 800:
                raise OverflowError("exp(theta . phi) does not decay in the tails; Z diverges")
        inner = np.flatnonzero((e[1:-1] >= e[:-2]) & (e[1:-1] >= e[2:])) + 1
        return float(e.max()), [float(grid[i]) for i in inner]


def log_partition(fam: ExpFamily, theta: Sequence[float]) -> float:
    """``ln Z(theta)`` by quadrature (or summation on a grid)."""
    return fam.moments(np.asarray(theta, dtype=float))[0]


def _armijo(evaluate, theta, val, grad, step, tries):
    """Backtracking line search; ``(t, theta, value, mean, cov)`` or ``None``."""
    t = 1.0
    for _ in range(tries):
        cand = theta - t * step
        cv, cm, cc = evaluate(cand)
        if np.isfinite(cv) and cv <= val - 1e-4 * t * (grad @ step) + 1e-14 * (1 + abs(val)):
            return t, cand, cv, cm, cc
        t *= 0.5
    return None


def maxent_solve(fam: ExpFamily, q: Sequence[float], theta0: Optional[Sequence[float]] = None,
                 tol: float = 1e-8, max_iter: int = 200) -> tuple[np.ndarray, float]:
    """Solve the moment equation ``grad ln Z(theta) = q`` and return ``h[q]``.

    Damped Newton on the convex dual ``ln Z(theta) - q . theta``; the
    Hessian is the covariance of the statistics under ``P_theta``.

    Returns
    -------
    theta : ndarray
        Natural parameter with ``||grad ln Z - q||_inf <= tol``.
    h_q : float
        Max-entropy value ``ln Z(theta) - q . theta``.
    """
    q = np.asarray(q, dtype=float)
    if q.size != fam.dim:
        raise ValueError(f"expected {fam.dim} moments, got {q.size}")
    theta = -np.ones(fam.dim) if theta0 is None else np.asarray(theta0, dtype=float).copy()

    def evaluate(t):
        try:
            with np.errstate(all="ignore"):
                lz, m, c = fam.moments(t)
        except OverflowError:
            return math.inf, None, None
        if not (np.isfinite(lz) and np.all(np.isfinite(m)) and np.all(np.isfinite(c))):
            return math.inf, None, None
        return lz - q @ t, m, c

    val, mean, cov = evaluate(theta)
    if not np.isfinite(val):
        raise MaxentError("initial theta outside the natural parameter region", math.inf)
    res = math.inf
    idle = 0
    for _ in range(max_iter):
        grad = mean - q
        res = float(np.max(np.abs(grad)))
        if res <= tol:
            return theta, float(val)
        # Levenberg damping: near the edge of the natural parameter region
        # the Newton direction can point outside it, and a growing ridge
        # term turns the step toward the gradient
        best = None
        mu = 0.0
        for _ in range(40):
            try:
                step = np.linalg.solve(cov + mu * np.eye(fam.dim), grad)
            except np.linalg.LinAlgError:
                step = grad / max(mu, 1.0)
            best = _armijo(evaluate, theta, val, grad, step, 6)
            if best is not None:
                break
            mu = max(10 * mu, 1e-3 * (1 + float(np.trace(cov))))
        if best is None or mu > 0 or best[0] < 1.0:
            # pinned on the region's edge, every full-space descent direction
            # points out of it: single-coordinate steps can still make progress
            for j in range(fam.dim):
                step = np.zeros(fam.dim)
                step[j] = grad[j] / max(cov[j, j], 1e-12)
                cand = _armijo(evaluate, theta, val, grad, step, 40)
                if cand is not None and (best is None or cand[2] < best[2]):
                    best = cand
        if best is None:
            break
        _, cand, cv, cm, cc = best
        idle = idle + 1 if val - cv <= 1e-15 * (1 + abs(val)) else 0
        theta, val, mean, cov = cand, cv, cm, cc
        if idle >= 5 or np.max(np.abs(theta)) > 1e8:
            # no progress, or theta running off: q is on or outside the
            # boundary of the moment map's range
            break
    grad = mean - q
    res = float(np.max(np.abs(grad)))
    if res <= tol:
        return theta, float(val)
    raise MaxentError("max-entropy Newton iteration stalled", res)


def generalized_gaussian_entropy(m: float, q: float) -> float:
    """Max entropy under ``E|X|^m = q``: ``(1/m) ln(m e q / (2 c_m))``.

    ``c_m = [m / (2^(1+1/m) Gamma(1/m))]^m``.
    """
    if m <= 0 or q <= 0:
        raise ValueError("need m > 0 and q > 0")
    log_cm = m * (math.log(m) - (1 + 1 / m) * math.log(2) - gammaln(1 / m))
    return (math.log(m * math.e * q / 2) - log_cm) / m


# ---------------------------------------------------------------------------
# Event exponents
# ---------------------------------------------------------------------------


def gaussian_ld_exponent(A: float, sigma2: float) -> float:
    """Exponent of ``Pr{sum X_i^2 >= n A}`` for IID ``N(0, sigma2)``."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    if A < sigma2:
        raise ValueError("need A >= sigma2 (otherwise the event is typical)")
    r = A / sigma2
    return 0.5 * (r - math.log(r) - 1)


def _gauss_div(mu: float, v: float, sigma2: float) -> float:
    return 0.5 * ((v + mu * mu) / sigma2 - math.log(v / sigma2) - 1)


def quadratic_event_exponent(A: float, B: float, sigma2: float) -> float:
    """Exponent of ``Pr{sum (X_i - A)^2 >= n B}`` for IID ``N(0, sigma2)``.

    Infimum of ``0.5 [s/sigma2 - ln((s - mu^2)/sigma2) - 1]`` over empirical
    ``(s, mu)`` with ``s - 2 A mu + A^2 >= B``. If the typical point is
    outside the set, the minimizer lies on its boundary, which is a convex
    one-dimensional problem; a coarse grid seeds a bounded Brent refine.
    """
    if not B > 0:
        raise ValueError("B must be positive")
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    if sigma2 + A * A >= B:
        return 0.0
    rb = math.sqrt(B)

    # on the boundary v = B - d^2 with d = mu - A
    def phi(d):
        return _gauss_div(A + d, B - d * d, sigma2)

    grid = np.linspace(-rb, rb, 2001)[1:-1]
    vals = np.array([phi(d) for d in grid])
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = optimize.minimize_scalar(phi, bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-12 * rb})
    return float(min(res.fun, vals[i]))


def autocorr_event_exponent(rho: float) -> float:
    """Exponent of ``Pr{sum X_t X_{t-1} >= rho sum X_t^2}``: ``-0.5 ln(1 - rho^2)``.

    The inner infimum over the power ``s_0`` is attained at ``s_0 = sigma^2``
    and vanishes, leaving only the Gauss-Markov volume loss.
    """
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    return -0.5 * math.log1p(-rho * rho)


def _abs_sq_family() -> ExpFamily:
    return ExpFamily([np.abs, np.square])


def mixed_stat_event_exponent(A: float, sigma2: float, return_point: bool = False):
    """Exponent of ``Pr{sum |X_i| >= n A}`` for IID ``N(0, sigma2)`` via types.

    Minimizes ``q2/(2 sigma2) - h[q1, q2] + 0.5 ln(2 pi sigma2)`` over
    ``q1 >= A``, ``q2 > q1^2``, with ``h`` from :func:`maxent_solve` on the
    statistics ``(|x|, x^2)``. The objective is a divergence, hence convex,
    so the constraint ``q1 >= A`` is active and a 1-D search over ``q2``
    remains.
    """
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    sigma = math.sqrt(sigma2)
    typical = sigma * math.sqrt(2 / math.pi)
    if A < typical - 1e-12:
        raise ValueError(f"need A >= sqrt(2/pi) sigma = {typical}")
    if A <= typical + 1e-12:
        return (0.0, (typical, sigma2)) if return_point else 0.0
    fam = _abs_sq_family()
    cache: dict = {"theta": np.array([0.0, -0.5 / sigma2])}
    const = 0.5 * math.log(2 * math.pi * sigma2)

    def objective(q2):
        theta, h = maxent_solve(fam, [A, q2], theta0=cache["theta"])
        cache["theta"] = theta
        return q2 / (2 * sigma2) - h + const

    # the optimum is an |x|-tilt of the Gaussian, whose Var|X| lies in
    # (sigma2 (1 - 2/pi), sigma2); the bracket below contains it
    lo, hi = A * A + 0.2 * sigma2, A * A + 1.05 * sigma2
    grid = np.linspace(lo, hi, 21)
    vals = []
    for q2 in grid:
        vals.append(objective(q2))
    i = int(np.argmin(vals))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = optimize.minimize_scalar(objective, bounds=(a, b), method="bounded",
                                   options={"xatol": 1e-9})
    val, q2 = (res.fun, res.x) if res.fun <= vals[i] else (vals[i], grid[i])
    return (float(val), (A, float(q2))) if return_point else float(val)
