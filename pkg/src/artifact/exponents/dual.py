"""Lagrange-dual lower bound on the random-coding exponent.

Writing ``[t]_+ = max_{0<=rho<=1} rho t`` and dualizing the score constraint
(``lam >= 0``) and the common y-marginal (``nu``) splits the primal into an
inner minimization over ``Q`` and one over ``Qt``. Both have closed forms;
the second is lower-bounded once more by Jensen's inequality and a maximum
over ``y``. Every admissible ``(rho, lam, nu)`` therefore gives a valid lower
bound and none is claimed to be tight.
"""
from __future__ import annotations


import numpy as np
import cvxpy as cp
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp

from ._common import DecoderScore, DualParams, channel_and_input, score_matrix

__all__ = ["dual_rc_bound", "dual_rc_optimize"]

_LAM_MAX = 50.0
_NU_MAX = 50.0


def _lam_alpha(lam: float, alpha: np.ndarray) -> np.ndarray:
    # lam * alpha with the convention 0 * (-inf) = 0
    if lam == 0.0:
        return np.zeros_like(alpha)
    return lam * alpha


def _bound(w: np.ndarray, p: np.ndarray, alpha: np.ndarray, R: float, rho: float, lam: float,
           nu: np.ndarray) -> float:
    on = p > 0
    w, p, la = w[on], p[on], _lam_alpha(lam, alpha[on])
    # inner min over Q: -sum_x P ln sum_{y: W>0} W exp(nu - lam alpha)
    with np.errstate(divide="ignore"):
        logw = np.log(w)
    t1 = np.where(w > 0, logw + nu[None, :] - np.where(w > 0, la, 0.0), -np.inf)
    first = -float(np.sum(p * logsumexp(t1, axis=1)))
    # inner min over Qt, after Jensen: -rho ln max_y sum_x P exp((lam alpha - nu) / rho)
    c = la - nu[None, :]
    if rho == 0.0:
        second = -float(np.max(c))
    else:
        with np.errstate(divide="ignore"):
            per_y = logsumexp(np.log(p)[:, None] + c / rho, axis=0)
        second = -rho * float(np.max(per_y))
    return first + second - rho * R


def dual_rc_bound(W, P, R: float, score: DecoderScore | None, d: DualParams) -> float:
    """Dual lower bound on :func:`rc_exponent` at one point ``(rho, lam, nu)``.

    Parameters
    ----------
    W, P : channel and input distribution
    R : float
        Rate in nats.
    score : DecoderScore or None
        Linear score; ``None`` means maximum likelihood.
    d : DualParams
        ``rho`` in ``[0, 1]``, ``lam >= 0`` and ``nu`` over the output alphabet.

    Returns
    -------
    float
        A value never above the primal exponent.
    """
    w, p = channel_and_input(W, P)
    score = DecoderScore.ml(w) if score is None else score
    alpha = score_matrix(score, w)
    if d.nu.size != w.shape[1]:
        raise ValueError(f"nu has {d.nu.size} entries, the output alphabet has {w.shape[1]}")
    return _bound(w, p, alpha, float(R), float(d.rho), float(d.lam), d.nu)


def _concave_solve(w: np.ndarray, p: np.ndarray, alpha: np.ndarray, R: float) -> np.ndarray | None:
    """Maximize the bound as a conic program; ``None`` if the solver fails.

    ``rho ln sum_x P exp(c/rho) <= t`` is the exponential-cone system
    ``z_x >= rho exp((c_x - t)/rho)``, ``sum_x P z_x <= rho``. Cells with
    ``alpha = -inf`` drop out of the second term for every ``lam > 0``, so
    the program computes the supremum as ``lam`` decreases to 0 and a
    returned ``lam = 0`` is nudged to ``1e-12``.
    """
    on = p > 0
    w, p, alpha = w[on], p[on], alpha[on]
    nx, ny = w.shape
    fin = np.isfinite(alpha)
    a0 = np.where(fin, alpha, 0.0)
    rho = cp.Variable(nonneg=True)
    lam = cp.Variable(nonneg=True)
    nu = cp.Variable(ny)
    tau = cp.Variable()
    first = 0
    for x in range(nx):
        ys = np.nonzero(w[x] > 0)[0]
        first = first - p[x] * cp.log_sum_exp(np.log(w[x, ys]) + nu[ys] - lam * a0[x, ys])
    cons = [rho <= 1, lam <= _LAM_MAX, nu >= -_NU_MAX, nu <= _NU_MAX, nu[0] == 0]
    for y in range(ny):
        xs = np.nonzero(fin[:, y])[0]
        if xs.size == 0:
            continue
        zs = cp.Variable(xs.size)
        c = lam * a0[xs, y] - nu[y]
        cons += [cp.constraints.ExpCone(c - tau, cp.hstack([rho] * xs.size), zs), p[xs] @ zs <= rho]
    prob = cp.Problem(cp.Maximize(first - tau - rho * R), cons)
    try:
        prob.solve(solver="CLARABEL")
    except cp.error.SolverError:
        return None
    if prob.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        return None
    lam_v = max(float(lam.value), 0.0)
    if lam_v == 0.0 and not fin.all():
        lam_v = 1e-12
    return np.r_[np.clip(float(rho.value), 0.0, 1.0), min(lam_v, _LAM_MAX), np.clip(nu.value, -_NU_MAX, _NU_MAX)]


def dual_rc_optimize(W, P, R: float, score: DecoderScore | None = None, sweeps: int = 200,
                     tol: float = 1e-11) -> tuple[DualParams, float]:
    """Cyclic coordinate ascent on the dual bound.

    Starts from ``rho = 1/2, lam = 0, nu = 0`` and maximizes one coordinate
    at a time with bounded Brent searches (``lam`` and ``nu`` are boxed to
    ``[0, 50]`` and ``[-50, 50]``; ``nu[0]`` stays at 0 because the bound is
    invariant under shifts of ``nu``). The bound is concave but not smooth,
    so coordinate ascent can stall on a kink of the maximum over ``y``.
    The ascent result is compared with the maximizer of the same concave
    function found by an exponential-cone program, and the better point
    (re-scored with the closed-form bound) is returned. Any returned point
    is a valid lower bound.
    """
    w, p = channel_and_input(W, P)
    score = DecoderScore.ml(w) if score is None else score
    alpha = score_matrix(score, w)
    R = float(R)
    ny = w.shape[1]
    x = np.zeros(2 + ny)
    x[0] = 0.5
    bounds = [(0.0, 1.0), (0.0, _LAM_MAX)] + [(-_NU_MAX, _NU_MAX)] * ny

    def value(v: np.ndarray) -> float:
        return _bound(w, p, alpha, R, v[0], v[1], v[2:])

    def coordinate_round(x: np.ndarray, best: float) -> float:
        for _ in range(sweeps):
            start = best
            best = coordinate_sweep(x, best)
            if best - start <= tol:
                break
        return best

    def coordinate_sweep(x: np.ndarray, best: float) -> float:
        # lam and nu first: moving rho first from lam = 0 collapses it to 0
        for k in [1] + list(range(3, 2 + ny)) + [0]:
            lo, hi = bounds[k]

            def neg(t, k=k):
                v = x.copy()
                v[k] = t
                return -value(v)

            res = minimize_scalar(neg, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
            cand = [(-res.fun, res.x), (-neg(lo), lo), (-neg(hi), hi)]
            val, t = max(cand, key=lambda c: c[0])
            if val > best:
                x[k], best = t, val
        return best

    best = coordinate_round(x, value(x))
    z = _concave_solve(w, p, alpha, R)
    if z is not None:
        val = value(z)
        if val > best:
            x, best = z, val
            best = coordinate_round(x, best)
    d = DualParams(float(x[0]), float(x[1]), x[2:].copy())
    return d, float(best)
