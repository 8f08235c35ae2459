"""Convex-program evaluation of channel and binning exponents.

The random-coding exponent ``min D + [I - R]_+`` is not convex as written
because of the clipping, but it splits into two convex problems: the
unclipped ``min D + I`` (whose minimizer fixes the critical rate) and the
constrained ``min D s.t. I <= R`` above it. The correct-decoding and
binning exponents split the same way with the roles of the branches
reversed. Each program is compiled once per channel and reused across rates
through a cvxpy parameter.
"""
from __future__ import annotations

import functools
import math
import warnings

import cvxpy as cp
import numpy as np

from ..types_core import _joint, _rows
from ._common import (
    DecoderScore,
    ExponentResult,
    ExponentSolverError,
    as_joint,
    channel_and_input,
    cond_entropy_x_given_y,
    divergence,
    mi_fixed_x,
    score_matrix,
)

__all__ = [
    "rc_exponent",
    "rc_exponent_mmi",
    "sp_exponent",
    "expurgated_exponent",
    "correct_decoding_exponent",
    "sw_binning_exponent",
    "bhattacharyya_matrix",
    "bhattacharyya_distance",
    "critical_rate",
    "rc_continuity_gap",
]

_SOLVER_PLAN = (
    ("CLARABEL", dict(tol_gap_abs=1e-11, tol_gap_rel=1e-11, tol_feas=1e-11, tol_ktratio=1e-9, max_iter=500)),
    ("CLARABEL", dict(tol_gap_abs=1e-9, tol_gap_rel=1e-9, tol_feas=1e-9, max_iter=500)),
    ("CLARABEL", {}),
    ("SCS", dict(eps_abs=1e-9, eps_rel=1e-9, max_iters=200000)),
)


def _solve(prob: cp.Problem, what: str) -> str:
    """Run the solver plan; the first OPTIMAL wins, else the first merely inaccurate point.

    Each call solves a fresh copy of ``prob``: a problem object that has
    been solved before takes a different canonicalization path, which moves
    the result in the last digits and would make output depend on history.
    """
    prob = cp.Problem(prob.objective, prob.constraints)
    last = "not attempted"
    fallback = None
    for name, opts in _SOLVER_PLAN:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                prob.solve(solver=name, **opts)
        except cp.error.SolverError as exc:
            last = str(exc)
            continue
        if prob.status == cp.OPTIMAL:
            return name
        if prob.status == cp.OPTIMAL_INACCURATE and fallback is None:
            fallback = (name, [v.value.copy() for v in prob.variables()])
        last = prob.status
    if fallback is not None:
        # callers recompute objective and residual from the restored point
        for v, val in zip(prob.variables(), fallback[1]):
            v.value = val
        return fallback[0] + " (inaccurate)"
    raise ExponentSolverError(f"{what}: no solver reached an optimal point (last status: {last})")


def _val(x: cp.Variable, forbid: np.ndarray | None = None) -> np.ndarray:
    """Solver point with round-off mass removed from forbidden cells (shows up in the residual)."""
    v = np.clip(np.asarray(x.value, dtype=float), 0.0, None)
    if forbid is not None:
        v[forbid] = 0.0
    return v


def _div(Q, ref: np.ndarray):
    return cp.sum(cp.rel_entr(Q, np.where(ref > 0, ref, 1.0)))


def _mi(Q, P: np.ndarray):
    ny = Q.shape[1]
    qy = cp.reshape(cp.sum(Q, axis=0), (1, ny), order="C")
    return cp.sum(cp.rel_entr(Q, P[:, None] @ qy))


def _neg_cond_entropy(Q):
    nx, ny = Q.shape
    qy = cp.reshape(cp.sum(Q, axis=0), (1, ny), order="C")
    return cp.sum(cp.rel_entr(Q, np.ones((nx, 1)) @ qy))


def _key(*arrays) -> tuple:
    out = []
    for a in arrays:
        if a is None:
            out.append(None)
        else:
            a = np.ascontiguousarray(a, dtype=float)
            out.append((a.shape, a.tobytes()))
    return tuple(out)


def _check_rate(R: float) -> float:
    R = float(R)
    if not math.isfinite(R) or R < 0:
        raise ValueError(f"rate must be finite and nonnegative, got {R}")
    return R


def _support(W: np.ndarray, P: np.ndarray):
    on = P > 0
    return W[on], P[on], on


def _embed(Q: np.ndarray, on: np.ndarray) -> np.ndarray:
    full = np.zeros((on.size, Q.shape[1]))
    full[on] = Q
    return full


# ---------------------------------------------------------------------------
# Random coding (linear decoders)
# ---------------------------------------------------------------------------


class _RcProgram:
    """Both convex branches of the random-coding exponent for one (W, P, alpha)."""

    def __init__(self, W: np.ndarray, P: np.ndarray, alpha: np.ndarray):
        self.Wf, self.Pf = W, P
        W, P, self.on = _support(W, P)
        alpha = alpha[self.on]
        self.W, self.P, self.alpha = W, P, alpha
        self.PW = P[:, None] * W
        nx, ny = W.shape
        a0 = np.where(np.isfinite(alpha), alpha, 0.0)
        Q = cp.Variable((nx, ny), nonneg=True)
        Qt = cp.Variable((nx, ny), nonneg=True)
        cons = [
            cp.sum(Q, axis=1) == P,
            cp.sum(Qt, axis=1) == P,
            cp.sum(Q, axis=0) == cp.sum(Qt, axis=0),
            cp.sum(cp.multiply(a0, Qt)) >= cp.sum(cp.multiply(a0, Q)),
        ]
        if np.any(W == 0):
            cons.append(cp.multiply(Q, (W == 0).astype(float)) == 0)
        if np.any(~np.isfinite(alpha)):
            cons.append(cp.multiply(Qt, (~np.isfinite(alpha)).astype(float)) == 0)
        self.Q, self.Qt = Q, Qt
        self.R = cp.Parameter(nonneg=True)
        D, I = _div(Q, self.PW), _mi(Qt, P)
        self.plus = cp.Problem(cp.Minimize(D + I), cons)
        self.minus = cp.Problem(cp.Minimize(D), cons + [I <= self.R])
        self.capacity = mi_fixed_x(self.PW)
        self._plus_cache = None

    def _eval(self, Q, Qt, R=None):
        D = divergence(Q, self.PW)
        I = mi_fixed_x(Qt)
        a0 = np.where(np.isfinite(self.alpha), self.alpha, 0.0)
        res = max(
            np.max(np.abs(Q.sum(axis=1) - self.P)),
            np.max(np.abs(Qt.sum(axis=1) - self.P)),
            np.max(np.abs(Q.sum(axis=0) - Qt.sum(axis=0))),
            max(float(np.sum(a0 * Q) - np.sum(a0 * Qt)), 0.0),
            0.0 if R is None else max(I - R, 0.0),
        )
        return D, I, float(res)

    def solve_plus(self):
        if self._plus_cache is None:
            solver = _solve(self.plus, "random-coding E+(0)")
            Q, Qt = _val(self.Q, self.W == 0), _val(self.Qt, ~np.isfinite(self.alpha))
            D, I, res = self._eval(Q, Qt)
            self._plus_cache = (D + I, I, Q, Qt, res, solver)
        return self._plus_cache

    def solve_minus(self, R: float):
        self.R.value = R
        solver = _solve(self.minus, f"random-coding E-(R={R})")
        Q, Qt = _val(self.Q, self.W == 0), _val(self.Qt, ~np.isfinite(self.alpha))
        D, I, res = self._eval(Q, Qt, R)
        return D, Q, Qt, res, solver

    def result(self, R: float) -> ExponentResult:
        E0, Rcr, Q0, Qt0, res0, solver = self.solve_plus()
        info = {"critical_rate": Rcr, "E0": E0}
        if R <= Rcr:
            return ExponentResult(R, E0 - R, (as_joint(_embed(Q0, self.on)), as_joint(_embed(Qt0, self.on))),
                                  "primal-convex", res0, {**info, "branch": "E+", "solver": solver})
        if R >= self.capacity:
            pw = as_joint(_embed(self.PW, self.on))
            return ExponentResult(R, 0.0, (pw, pw), "primal-convex", 0.0, {**info, "branch": "E-"})
        D, Q, Qt, res, solver = self.solve_minus(R)
        return ExponentResult(R, max(D, 0.0), (as_joint(_embed(Q, self.on)), as_joint(_embed(Qt, self.on))),
                              "primal-convex", res, {**info, "branch": "E-", "solver": solver})


@functools.lru_cache(maxsize=64)
def _rc_program(key) -> _RcProgram:
    (ws, wb), (ps, pb), (as_, ab) = key
    W = np.frombuffer(wb).reshape(ws)
    P = np.frombuffer(pb).reshape(ps)
    A = np.frombuffer(ab).reshape(as_)
    return _RcProgram(W, P, A)


def rc_exponent(W, P, R: float, score: DecoderScore | None = None) -> ExponentResult:
    """Random-coding exponent of an additive-metric decoder.

    ``min D(Q||P x W) + [I(Qt) - R]_+`` over pairs with a common output
    marginal and ``alpha(Qt) >= alpha(Q)``. The unclipped problem gives
    ``E+(0)`` and the critical rate ``R_cr = I(Qt0)``; below ``R_cr`` the
    exponent is ``E+(0) - R`` and above it the constrained branch
    ``min D s.t. I(Qt) <= R`` is solved.

    Parameters
    ----------
    W : Channel or array
        Channel matrix ``W[x, y]``.
    P : Dist or array
        Input composition.
    R : float
        Rate in nats.
    score : DecoderScore, optional
        Decoder metric; maximum likelihood by default. ``mmi`` is routed to
        :func:`rc_exponent_mmi`.
    """
    w, p = channel_and_input(W, P)
    R = _check_rate(R)
    score = DecoderScore.ml(w) if score is None else score
    if score.tag == "mmi":
        return rc_exponent_mmi(w, p, R)
    alpha = score_matrix(score, w)
    return _rc_program(_key(w, p, alpha)).result(R)


def critical_rate(W, P, score: DecoderScore | None = None) -> float:
    """``R_cr`` of the random-coding exponent."""
    return rc_exponent(W, P, 0.0, score).info["critical_rate"]


def rc_continuity_gap(W, P, score: DecoderScore | None = None) -> float:
    """``|E+(0) - R_cr - E-(R_cr)|``; zero up to solver accuracy."""
    w, p = channel_and_input(W, P)
    score = DecoderScore.ml(w) if score is None else score
    prog = _rc_program(_key(w, p, score_matrix(score, w)))
    E0, Rcr, *_ = prog.solve_plus()
    if Rcr >= prog.capacity:
        return abs(E0 - Rcr)
    D, *_ = prog.solve_minus(Rcr)
    return abs(E0 - Rcr - D)


# ---------------------------------------------------------------------------
# MMI and sphere packing
# ---------------------------------------------------------------------------


class _SingleProgram:
    """``min D(Q||P x W)`` with an optional ``I(Q) <= R`` constraint."""

    def __init__(self, W: np.ndarray, P: np.ndarray):
        W, P, self.on = _support(W, P)
        self.W, self.P = W, P
        self.PW = P[:, None] * W
        Q = cp.Variable(W.shape, nonneg=True)
        cons = [cp.sum(Q, axis=1) == P]
        if np.any(W == 0):
            cons.append(cp.multiply(Q, (W == 0).astype(float)) == 0)
        self.Q = Q
        self.R = cp.Parameter(nonneg=True)
        D, I = _div(Q, self.PW), _mi(Q, P)
        self.plus = cp.Problem(cp.Minimize(D + I), cons)
        self.sp = cp.Problem(cp.Minimize(D), cons + [I <= self.R])
        self.capacity = mi_fixed_x(self.PW)
        self._plus_cache = None

    def _res(self, Q, R=None):
        r = float(np.max(np.abs(Q.sum(axis=1) - self.P)))
        if R is not None:
            r = max(r, mi_fixed_x(Q) - R)
        return max(r, 0.0)

    def solve_plus(self):
        if self._plus_cache is None:
            solver = _solve(self.plus, "MMI E+(0)")
            Q = _val(self.Q, self.W == 0)
            I = mi_fixed_x(Q)
            self._plus_cache = (divergence(Q, self.PW) + I, I, Q, self._res(Q), solver)
        return self._plus_cache

    def sphere_packing(self, R: float) -> ExponentResult:
        if R >= self.capacity:
            pw = as_joint(_embed(self.PW, self.on))
            return ExponentResult(R, 0.0, (pw,), "primal-convex", 0.0, {})
        if R == 0.0:
            return self._zero_rate()
        self.R.value = R
        solver = _solve(self.sp, f"sphere packing (R={R})")
        Q = _val(self.Q, self.W == 0)
        return ExponentResult(R, max(divergence(Q, self.PW), 0.0), (as_joint(_embed(Q, self.on)),),
                              "primal-convex", self._res(Q, R), {"solver": solver})


    def _zero_rate(self) -> ExponentResult:
        # I(Q) = 0 forces Q = P x q; the optimal q is the normalized geometric mean of the rows
        with np.errstate(divide="ignore"):
            logg = self.P @ np.log(self.W)
        z = float(np.sum(np.exp(logg)))
        if z == 0.0:
            return ExponentResult(0.0, math.inf, (), "primal-convex", 0.0, {"branch": "R=0"})
        q = np.exp(logg) / z
        Q = self.P[:, None] * q[None, :]
        return ExponentResult(0.0, -math.log(z), (as_joint(_embed(Q, self.on)),), "primal-convex", 0.0,
                              {"branch": "R=0"})


@functools.lru_cache(maxsize=64)
def _single_program(key) -> _SingleProgram:
    (ws, wb), (ps, pb) = key
    return _SingleProgram(np.frombuffer(wb).reshape(ws), np.frombuffer(pb).reshape(ps))


def rc_exponent_mmi(W, P, R: float) -> ExponentResult:
    """Random-coding exponent of the MMI decoder.

    ``min_Q D(Q||P x W) + [I(Q) - R]_+``, split at ``R_cr = I(Q0)`` with
    ``Q0`` the minimizer of ``D + I``; above ``R_cr`` it equals the
    sphere-packing exponent.
    """
    w, p = channel_and_input(W, P)
    R = _check_rate(R)
    prog = _single_program(_key(w, p))
    E0, Rcr, Q0, res0, solver = prog.solve_plus()
    info = {"critical_rate": Rcr, "E0": E0}
    if R <= Rcr:
        return ExponentResult(R, E0 - R, (as_joint(_embed(Q0, prog.on)),), "primal-convex", res0,
                              {**info, "branch": "E+", "solver": solver})
    out = prog.sphere_packing(R)
    return ExponentResult(R, out.value, out.minimizers, out.method, out.residual,
                          {**info, **out.info, "branch": "E-"})


def sp_exponent(W, P, R: float) -> ExponentResult:
    """Sphere-packing exponent ``min {D(Q||P x W) : I(Q) <= R}``."""
    w, p = channel_and_input(W, P)
    R = _check_rate(R)
    return _single_program(_key(w, p)).sphere_packing(R)


# ---------------------------------------------------------------------------
# Expurgated
# ---------------------------------------------------------------------------


def bhattacharyya_matrix(W) -> np.ndarray:
    """``-ln sum_y sqrt(W(y|x) W(y|x'))`` for every input pair (``+inf`` if disjoint)."""
    s = np.sqrt(_rows(W))
    z = np.clip(s @ s.T, 0.0, 1.0)
    with np.errstate(divide="ignore"):
        return -np.log(z)


def bhattacharyya_distance(Q, W) -> float:
    """``d_B(Q) = sum Q(x, x') * (-ln sum_y sqrt(W(y|x) W(y|x')))``."""
    q = _joint(Q)
    d = bhattacharyya_matrix(W)
    if q.shape != d.shape:
        raise ValueError(f"pair distribution {q.shape} does not match |X| = {d.shape[0]}")
    if np.any((q > 0) & ~np.isfinite(d)):
        return math.inf
    return float(np.sum(np.where(q > 0, q * np.where(np.isfinite(d), d, 0.0), 0.0)))


def expurgated_exponent(W, P, R: float) -> ExponentResult:
    """Expurgated exponent ``min {d_B(Q) + I(Q) : Q_X = Q_X' = P, I(Q) <= R} - R``.

    The raw value is returned; it may be negative at high rates.
    """
    w, p = channel_and_input(W, P)
    R = _check_rate(R)
    on = p > 0
    ps = p[on]
    d = bhattacharyya_matrix(w)[np.ix_(on, on)]
    k = ps.size
    if R == 0.0:
        # I(Q) <= 0 leaves only the product pair distribution
        q = np.outer(ps, ps)
        val = math.inf if np.any(~np.isfinite(d)) else float(np.sum(d * q))
        full = np.zeros((p.size, p.size))
        full[np.ix_(on, on)] = q
        return ExponentResult(0.0, val, (as_joint(full),), "primal-convex", 0.0, {"branch": "R=0"})
    Q = cp.Variable((k, k), nonneg=True)
    d0 = np.where(np.isfinite(d), d, 0.0)
    PP = np.outer(ps, ps)
    I = cp.sum(cp.rel_entr(Q, PP))
    cons = [cp.sum(Q, axis=1) == ps, cp.sum(Q, axis=0) == ps, I <= R]
    if np.any(~np.isfinite(d)):
        cons.append(cp.multiply(Q, (~np.isfinite(d)).astype(float)) == 0)
    prob = cp.Problem(cp.Minimize(cp.sum(cp.multiply(d0, Q)) + I), cons)
    solver = _solve(prob, f"expurgated (R={R})")
    q = _val(Q, ~np.isfinite(d))
    Iq = float(np.sum(np.where(q > 0, q * np.log(np.where(q > 0, q, 1.0) / PP), 0.0)))
    val = float(np.sum(d0 * q)) + Iq - R
    res = max(np.max(np.abs(q.sum(axis=1) - ps)), np.max(np.abs(q.sum(axis=0) - ps)), Iq - R, 0.0)
    full = np.zeros((p.size, p.size))
    full[np.ix_(on, on)] = q
    return ExponentResult(R, val, (as_joint(full),), "primal-convex", float(res), {"solver": solver})


# ---------------------------------------------------------------------------
# Correct decoding
# ---------------------------------------------------------------------------


class _CdProgram:
    """``min D - I`` (convex: ``-E_Q ln W - H(Q_Y)``), free and with ``I <= R``."""

    def __init__(self, W: np.ndarray, P: np.ndarray):
        W, P, self.on = _support(W, P)
        self.W, self.P = W, P
        self.PW = P[:, None] * W
        Q = cp.Variable(W.shape, nonneg=True)
        cons = [cp.sum(Q, axis=1) == P]
        if np.any(W == 0):
            cons.append(cp.multiply(Q, (W == 0).astype(float)) == 0)
        lnW = np.log(np.where(W > 0, W, 1.0))
        obj = -cp.sum(cp.multiply(lnW, Q)) - cp.sum(cp.entr(cp.sum(Q, axis=0)))
        self.Q = Q
        self.R = cp.Parameter(nonneg=True)
        self.free = cp.Problem(cp.Minimize(obj), cons)
        self.capped = cp.Problem(cp.Minimize(obj), cons + [_mi(Q, P) <= self.R])
        self.capacity = mi_fixed_x(self.PW)
        self._free_cache = None

    def _gap(self, Q):
        return divergence(Q, self.PW) - mi_fixed_x(Q)

    def solve_free(self):
        if self._free_cache is None:
            solver = _solve(self.free, "correct decoding, unconstrained")
            Q = _val(self.Q, self.W == 0)
            res = float(np.max(np.abs(Q.sum(axis=1) - self.P)))
            self._free_cache = (self._gap(Q), mi_fixed_x(Q), Q, res, solver)
        return self._free_cache

    def result(self, R: float) -> ExponentResult:
        if R <= self.capacity:
            pw = as_joint(_embed(self.PW, self.on))
            return ExponentResult(R, 0.0, (pw,), "primal-convex", 0.0, {"branch": "zero"})
        E0, I0, Q0, res0, solver = self.solve_free()
        info = {"slope_one_rate": I0, "E0": E0}
        if R >= I0:
            return ExponentResult(R, E0 + R, (as_joint(_embed(Q0, self.on)),), "primal-convex", res0,
                                  {**info, "branch": "slope-one", "solver": solver})
        self.R.value = R
        solver = _solve(self.capped, f"correct decoding (R={R})")
        Q = _val(self.Q, self.W == 0)
        res = max(float(np.max(np.abs(Q.sum(axis=1) - self.P))), mi_fixed_x(Q) - R, 0.0)
        return ExponentResult(R, max(self._gap(Q) + R, 0.0), (as_joint(_embed(Q, self.on)),),
                              "primal-convex", res, {**info, "branch": "capped", "solver": solver})


@functools.lru_cache(maxsize=64)
def _cd_program(key) -> _CdProgram:
    (ws, wb), (ps, pb) = key
    return _CdProgram(np.frombuffer(wb).reshape(ws), np.frombuffer(pb).reshape(ps))


def correct_decoding_exponent(W, P, R: float) -> ExponentResult:
    """Correct-decoding exponent ``min_Q D(Q||P x W) + [R - I(Q)]_+``.

    Zero up to ``I(P x W)``. Above it the minimizer satisfies ``I(Q) <= R``,
    so the exponent is ``R + min {D - I : I(Q) <= R}``, a convex program;
    once ``R`` passes the mutual information of the unconstrained minimizer
    of ``D - I`` the curve has slope one.
    """
    w, p = channel_and_input(W, P)
    R = _check_rate(R)
    return _cd_program(_key(w, p)).result(R)


# ---------------------------------------------------------------------------
# Slepian-Wolf random binning
# ---------------------------------------------------------------------------


class _SwProgram:
    def __init__(self, Pxy: np.ndarray):
        if np.any(Pxy <= 0):
            raise ValueError("binning exponent needs a joint source with full support")
        self.Pxy = Pxy
        g = np.log(Pxy / Pxy.sum(axis=0, keepdims=True))
        self.g = g
        Q = cp.Variable(Pxy.shape, nonneg=True)
        Qp = cp.Variable(Pxy.shape, nonneg=True)
        cons = [
            cp.sum(Q) == 1,
            cp.sum(Qp) == 1,
            cp.sum(Q, axis=0) == cp.sum(Qp, axis=0),
            cp.sum(cp.multiply(g, Qp)) >= cp.sum(cp.multiply(g, Q)),
        ]
        self.Q, self.Qp = Q, Qp
        self.R = cp.Parameter()
        D, negH = _div(Q, Pxy), _neg_cond_entropy(Qp)
        self.free = cp.Problem(cp.Minimize(D + negH), cons)
        self.capped = cp.Problem(cp.Minimize(D), cons + [negH <= -self.R])
        self.h_true = cond_entropy_x_given_y(Pxy)
        self._free_cache = None

    def _res(self, Q, Qp, R=None):
        r = max(abs(Q.sum() - 1), abs(Qp.sum() - 1),
                float(np.max(np.abs(Q.sum(axis=0) - Qp.sum(axis=0)))),
                float(np.sum(self.g * Q) - np.sum(self.g * Qp)))
        if R is not None:
            r = max(r, R - cond_entropy_x_given_y(Qp))
        return max(float(r), 0.0)

    def solve_free(self):
        if self._free_cache is None:
            solver = _solve(self.free, "binning, unconstrained")
            Q, Qp = _val(self.Q), _val(self.Qp)
            H = cond_entropy_x_given_y(Qp)
            self._free_cache = (divergence(Q, self.Pxy) - H, H, Q, Qp, self._res(Q, Qp), solver)
        return self._free_cache

    def result(self, R: float) -> ExponentResult:
        if R <= self.h_true:
            P = as_joint(self.Pxy)
            return ExponentResult(R, 0.0, (P, P), "primal-convex", 0.0, {"branch": "zero"})
        E0, Hc, Q0, Qp0, res0, solver = self.solve_free()
        info = {"slope_one_rate": Hc, "E0": E0}
        if R >= Hc:
            return ExponentResult(R, E0 + R, (as_joint(Q0), as_joint(Qp0)), "primal-convex", res0,
                                  {**info, "branch": "slope-one", "solver": solver})
        self.R.value = R
        solver = _solve(self.capped, f"binning (R={R})")
        Q, Qp = _val(self.Q), _val(self.Qp)
        return ExponentResult(R, max(divergence(Q, self.Pxy), 0.0), (as_joint(Q), as_joint(Qp)),
                              "primal-convex", self._res(Q, Qp, R), {**info, "branch": "capped", "solver": solver})


@functools.lru_cache(maxsize=32)
def _sw_program(key) -> _SwProgram:
    ((s, b),) = key
    return _SwProgram(np.frombuffer(b).reshape(s))


def sw_binning_exponent(Pxy, R: float) -> ExponentResult:
    """Random-binning exponent for lossless coding of ``X`` with side information ``Y``.

    ``min D(Q||P_XY) + [R - H_Q'(X|Y)]_+`` over pairs with ``Q'_Y = Q_Y``
    and ``E_Q' ln P(X|Y) >= E_Q ln P(X|Y)``. Zero for ``R <= H(X|Y)``.
    """
    P = _joint(Pxy)
    R = _check_rate(R)
    return _sw_program(_key(P)).result(R)
