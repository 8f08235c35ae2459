"""Exact finite-blocklength evaluation of the fixed-composition ensemble.

For a binary-input binary-output channel the transmitted codeword can be
taken as any sequence of the composition; the channel output then has a
joint type ``Q`` with it, and every independent competitor drawn uniformly
from the composition class has a joint type with the output that is
hypergeometric given the output's y-marginal. The union event "some
competitor scores at least as well" is summed exactly over ``Q``.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln, logsumexp

from ._common import DecoderScore, channel_and_input
from .grid import round_composition

__all__ = [
    "ensemble_error_probability_exact",
    "log_ensemble_error_probability_exact",
    "ensemble_error_probability_mc",
]

_MAX_N = 400


def _lchoose(a, b):
    return gammaln(np.asarray(a) + 1.0) - gammaln(np.asarray(b) + 1.0) - gammaln(np.asarray(a) - np.asarray(b) + 1.0)


def _scores(score: DecoderScore, w: np.ndarray, C: np.ndarray, n: int) -> np.ndarray:
    """Scores of joint types with count matrices ``C[k, x, y]``."""
    if score.tag == "mmi":
        Q = C / n
        qx, qy = Q.sum(axis=2), Q.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(Q > 0, Q * np.log(Q / (qx[:, :, None] * qy[:, None, :])), 0.0)
        return t.sum(axis=(1, 2))
    a = score.coeffs
    fin = np.isfinite(a)
    s = np.where(C > 0, C * np.where(fin, a, 0.0), 0.0).sum(axis=(1, 2)) / n
    s[((C > 0) & ~fin[None]).any(axis=(1, 2))] = -np.inf
    return s


def log_ensemble_error_probability_exact(W, P, n: int, R: float, score: DecoderScore | None = None) -> float:
    """Natural log of :func:`ensemble_error_probability_exact` (``-inf`` when it is 0)."""
    w, p = channel_and_input(W, P)
    if w.shape != (2, 2):
        raise ValueError("the exact ensemble oracle handles binary input and output only")
    n = int(n)
    if not 1 <= n <= _MAX_N:
        raise OverflowError(f"blocklength must lie in [1, {_MAX_N}], got {n}")
    if R < 0:
        raise ValueError("rate must be nonnegative")
    score = DecoderScore.ml(w) if score is None else score
    if score.tag != "mmi" and score.coeffs.shape != w.shape:
        raise ValueError("score shape does not match the channel")
    lm = n * float(R)
    # M = ceil(e^{nR}); M - 1 competitors
    m_minus_1 = math.ceil(math.exp(lm) - 1e-12 * math.exp(lm)) - 1 if lm < 700 else math.exp(lm)
    if m_minus_1 <= 0:
        return -math.inf
    n0, n1 = (int(c) for c in round_composition(p, n))
    with np.errstate(divide="ignore"):
        logw = np.log(w)

    # transmitted types: k0 = #(x=0, y=0), k1 = #(x=1, y=0)
    k0 = np.arange(n0 + 1)[:, None]
    k1 = np.arange(n1 + 1)[None, :]
    with np.errstate(invalid="ignore"):
        lp = (_lchoose(n0, k0) + _lchoose(n1, k1)
              + np.where(k0 > 0, k0 * logw[0, 0], 0.0) + np.where(n0 - k0 > 0, (n0 - k0) * logw[0, 1], 0.0)
              + np.where(k1 > 0, k1 * logw[1, 0], 0.0) + np.where(n1 - k1 > 0, (n1 - k1) * logw[1, 1], 0.0))
    lp = np.where(np.isnan(lp), -np.inf, lp)
    K0, K1 = np.broadcast_arrays(k0, k1)
    m0_all = K0 + K1
    C_tx = np.stack([np.stack([K0, n0 - K0], -1), np.stack([K1, n1 - K1], -1)], -2).reshape(-1, 2, 2)
    s_tx = _scores(score, w, C_tx, n).reshape(K0.shape)
    lC = _lchoose(n, n0)

    terms = []
    for m0 in range(n + 1):
        sel = (m0_all == m0) & np.isfinite(lp)
        if not sel.any():
            continue
        m1 = n - m0
        j = np.arange(max(0, n0 - m1), min(n0, m0) + 1)
        # competitor joint type: j of its zeros sit under y=0
        Cc = np.stack([np.stack([j, n0 - j], -1), np.stack([m0 - j, m1 - (n0 - j)], -1)], -2)
        sc = _scores(score, w, Cc, n)
        lq = _lchoose(m0, j) + _lchoose(m1, n0 - j) - lC
        order = np.argsort(-sc, kind="stable")
        sc_s, lq_s = sc[order], lq[order]
        cum = np.logaddexp.accumulate(lq_s)
        st = s_tx[sel]
        tol = np.where(np.isfinite(st), 1e-12 * (1.0 + np.abs(st)), 0.0)
        # competitors with score >= transmitted score win (ties included)
        pos = np.searchsorted(-sc_s, -st + tol, side="right") - 1
        lpw = np.where(pos >= 0, cum[np.maximum(pos, 0)], -np.inf)
        pw = np.minimum(np.exp(lpw), 1.0)
        with np.errstate(divide="ignore"):
            miss = m_minus_1 * np.log1p(-pw)
            lfac = np.log(-np.expm1(miss))
        terms.append(lp[sel] + lfac)
    if not terms:
        return -math.inf
    return float(logsumexp(np.concatenate(terms)))


def ensemble_error_probability_exact(W, P, n: int, R: float, score: DecoderScore | None = None) -> float:
    """Ensemble-average probability that some competitor scores at least as well.

    Codewords are drawn independently and uniformly from the type class of
    the composition ``round(nP)``; ``M = ceil(e^{nR})`` and ties count as
    errors. Exact up to floating point, summed in the log domain.

    Parameters
    ----------
    W : 2x2 channel
    P : input distribution (rounded to a composition of ``n``)
    n : int
        Blocklength, at most 400.
    R : float
        Rate in nats.
    score : DecoderScore, optional
        Maximum likelihood by default; ``mmi`` and linear scores are supported.
    """
    return math.exp(log_ensemble_error_probability_exact(W, P, n, R, score))


def ensemble_error_probability_mc(W, P, n: int, R: float, score: DecoderScore | None = None,
                                  trials: int = 100_000, seed: int = 0, batch: int = 20_000) -> tuple[float, float]:
    """Monte-Carlo estimate of the same union event (small ``M`` only).

    Returns the estimate and its binomial standard error.
    """
    w, p = channel_and_input(W, P)
    score = DecoderScore.ml(w) if score is None else score
    M = math.ceil(math.exp(n * R) - 1e-12 * math.exp(n * R))
    if M - 1 > 10_000:
        raise OverflowError("too many competitors for direct simulation")
    if M <= 1:
        return 0.0, 0.0
    counts = round_composition(p, n)
    x = np.repeat(np.arange(w.shape[0]), counts)
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    ny = w.shape[1]
    while done < trials:
        b = min(batch, trials - done)
        u = rng.random((b, n))
        y = (u[:, :, None] > np.cumsum(w[x], axis=1)[None, :, :-1]).sum(axis=2) if ny > 2 else (u > w[x, 0]).astype(int)
        tx = np.zeros((b, w.shape[0], ny), dtype=np.int64)
        np.add.at(tx, (np.arange(b)[:, None], x[None, :], y), 1)
        s_tx = _scores(score, w, tx, n)
        win = np.zeros(b, dtype=bool)
        for _ in range(M - 1):
            xc = rng.permuted(np.broadcast_to(x, (b, n)), axis=1)
            cc = np.zeros((b, w.shape[0], ny), dtype=np.int64)
            np.add.at(cc, (np.arange(b)[:, None], xc, y), 1)
            sc = _scores(score, w, cc, n)
            win |= sc >= s_tx - np.where(np.isfinite(s_tx), 1e-12 * (1 + np.abs(s_tx)), 0.0)
        hits += int(win.sum())
        done += b
    est = hits / trials
    return est, math.sqrt(max(est * (1 - est), 1e-300) / trials)
