"""Exhaustive joint-type oracles for the exponent calculators.

Every continuum minimization is replaced by a minimum over joint types of
denominator ``n``. The transmitted type and the competing type must share a
y-marginal, so types are processed one y-marginal group at a time; inside a
group the constraint ``alpha(Qt) >= alpha(Q)`` becomes a prefix of the types
sorted by score, and the smallest competing mutual information is a
running minimum.
"""
from __future__ import annotations

import math
from typing import Iterator

import numpy as np

from ..types_core import MAX_TYPES, _joint, compositions, joint_type_counts
from ._common import DecoderScore, ExponentResult, as_joint, channel_and_input, score_matrix

__all__ = [
    "round_composition",
    "rc_exponent_grid",
    "rc_grid_curve",
    "mmi_grid_curve",
    "sp_grid_curve",
    "cd_grid_curve",
    "ex_grid_curve",
    "sw_grid_curve",
]

_MAX_DENOM = 400
_MAX_CELLS = 9


def round_composition(P, n: int) -> np.ndarray:
    """Largest-remainder rounding of ``n P`` to integer counts summing to ``n``."""
    p = np.asarray(P, dtype=float)
    raw = n * p
    base = np.floor(raw).astype(np.int64)
    short = n - int(base.sum())
    order = np.argsort(-(raw - base), kind="stable")
    base[order[:short]] += 1
    return base


def _xlogx_table(n: int) -> np.ndarray:
    k = np.arange(n + 1) / n
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(k > 0, k * np.log(np.where(k > 0, k, 1.0)), 0.0)


def _check_size(nx: int, ny: int, denom: int) -> None:
    if nx * ny > _MAX_CELLS:
        raise OverflowError(f"grid oracle supports |X||Y| <= {_MAX_CELLS}, got {nx * ny}")
    if not 1 <= denom <= _MAX_DENOM:
        raise OverflowError(f"denominator must lie in [1, {_MAX_DENOM}], got {denom}")


class _ChannelGrid:
    """Divergence, score and mutual information of joint types, by y-marginal group.

    All three quantities are sums of per-row terms plus a function of the
    y-marginal, so each row's compositions are tabulated once and a group
    only gathers table entries.
    """

    def __init__(self, W: np.ndarray, P: np.ndarray, denom: int, alpha: np.ndarray | None):
        nx, ny = W.shape
        _check_size(nx, ny, denom)
        self.n, self.ny = denom, ny
        self.rows = round_composition(P, denom)
        Phat = self.rows / denom
        self.lut = _xlogx_table(denom)
        with np.errstate(divide="ignore"):
            logref = np.log(Phat[:, None] * W)
        self.hx = float(np.sum(self.lut[self.rows]))
        self.out_marg = Phat @ W
        self.has_alpha = alpha is not None
        self.comps, self.tabs = [], []
        for x in range(nx):
            c = compositions(int(self.rows[x]), ny)
            q = c / denom
            xl = self.lut[c].sum(axis=1)
            fin = np.isfinite(logref[x])
            cross = np.where(c > 0, q * np.where(fin, logref[x], 0.0), 0.0).sum(axis=1)
            d = xl - cross
            d[((c > 0) & ~fin).any(axis=1)] = np.inf
            if alpha is not None:
                afin = np.isfinite(alpha[x])
                a = np.where(c > 0, q * np.where(afin, alpha[x], 0.0), 0.0).sum(axis=1)
                a[((c > 0) & ~afin).any(axis=1)] = -np.inf
            else:
                a = np.zeros(c.shape[0])
            self.comps.append(c)
            self.tabs.append((xl, d, a))
        if nx == 2:
            # dense index of row-1 compositions keyed by their first ny-1 entries
            c1 = self.comps[1]
            self.dims = (int(self.rows[1]) + 1,) * (ny - 1)
            self.index1 = np.full(math.prod(self.dims) if ny > 1 else 1, -1, dtype=np.int64)
            self.index1[self._key1(c1)] = np.arange(c1.shape[0])
        else:
            total = math.prod(c.shape[0] for c in self.comps)
            if total > MAX_TYPES:
                raise OverflowError(f"{total} joint types exceed the {MAX_TYPES} guard")

    def _key1(self, c: np.ndarray) -> np.ndarray:
        if self.ny == 1:
            return np.zeros(c.shape[0], dtype=np.int64)
        return np.ravel_multi_index(c[:, :-1].T, self.dims)

    def groups(self, cutoff=lambda: np.inf, chunk: int = 1 << 17) -> Iterator[tuple]:
        """Yield batches ``(gid, handle, D, I, A)`` of whole y-marginal groups.

        ``gid`` numbers the groups inside the batch (nondecreasing) and
        ``handle`` holds per-row composition indices, see :meth:`counts`.
        Every type in the group of y-marginal ``m`` has divergence at least
        ``D(m/n || P W)``, so groups are visited in increasing order of that
        bound and the walk stops once it reaches ``cutoff()``.
        """
        lut = self.lut
        if len(self.rows) == 2:
            c0 = self.comps[0]
            (xl0, d0, a0), (xl1, d1, a1) = self.tabs
            ms = compositions(self.n, self.ny)
            hy = lut[ms].sum(axis=1)
            with np.errstate(divide="ignore"):
                lb = hy - (ms / self.n) @ np.where(self.out_marg > 0, np.log(np.where(self.out_marg > 0, self.out_marg, 1.0)), -np.inf)
            lb = np.where(np.isnan(lb), np.inf, lb)
            visit = np.argsort(lb, kind="stable")
            step = max(1, chunk // c0.shape[0])
            for s in range(0, visit.size, step):
                sel = visit[s:s + step]
                if lb[sel[0]] >= cutoff():
                    return
                mb = ms[sel]
                gi, ok = np.nonzero(np.all(c0[None, :, :] <= mb[:, None, :], axis=2))
                if ok.size == 0:
                    continue
                j = self.index1[self._key1(mb[gi] - c0[ok])]
                D = d0[ok] + d1[j]
                I = np.maximum(xl0[ok] + xl1[j] - self.hx - hy[sel[gi]], 0.0)
                yield gi, (ok, j), D, I, a0[ok] + a1[j]
            return
        grids = np.meshgrid(*[np.arange(c.shape[0]) for c in self.comps], indexing="ij")
        idx = np.stack([g.ravel() for g in grids], axis=1)
        m = sum(c[idx[:, x]] for x, c in enumerate(self.comps))
        key = np.ravel_multi_index(m.T, (self.n + 1,) * self.ny)
        order = np.argsort(key, kind="stable")
        idx, key, m = idx[order], key[order], m[order]
        gid = np.r_[0, np.cumsum(np.diff(key) != 0)]
        xl = sum(t[0][idx[:, x]] for x, t in enumerate(self.tabs))
        D = sum(t[1][idx[:, x]] for x, t in enumerate(self.tabs))
        A = sum(t[2][idx[:, x]] for x, t in enumerate(self.tabs))
        I = np.maximum(xl - self.hx - lut[m].sum(axis=1), 0.0)
        yield gid, tuple(idx.T), D, I, A

    def counts(self, handle, k: int) -> np.ndarray:
        """Count matrix of member ``k`` of a batch handle."""
        return np.stack([c[h[k]] for c, h in zip(self.comps, handle)])


def _segmented_prefix(gid: np.ndarray, key: np.ndarray, val: np.ndarray, minimize: bool = True):
    """Within each group: best ``val`` over members whose ``key`` is at least the member's own.

    Keys within ``1e-12 (1 + |key|)`` count as ties and the competitor is
    admitted. Groups are laid out on disjoint stretches of one sorted axis
    so a single sort, running extremum and binary search serve all of them.

    Returns
    -------
    best : ndarray
        Best value per member.
    arg : ndarray
        Index of a member attaining it.
    """
    fin = np.isfinite(key)
    lo, hi = (float(key[fin].min()), float(key[fin].max())) if fin.any() else (0.0, 0.0)
    k = np.where(fin, key, lo - 1.0)
    span = hi - lo + 4.0
    order = np.lexsort((-k, gid))
    g = gid[order]
    axis = g * span - k[order]
    u = val[order] if minimize else -val[order]
    vspan = 2.0 * float(np.max(np.abs(u))) + 1.0
    shifted = u - g * vspan
    run = np.minimum.accumulate(shifted)
    best = run + g * vspan
    is_new = np.r_[True, shifted[1:] < run[:-1]]
    arg = order[np.maximum.accumulate(np.where(is_new, np.arange(u.size), 0))]
    tol = 1e-12 * (1.0 + np.abs(k))
    where = np.searchsorted(axis, gid * span - k + tol, side="right") - 1
    out = best[where]
    return (out if minimize else -out), arg[where]


def _rates(R) -> np.ndarray:
    r = np.atleast_1d(np.asarray(R, dtype=float))
    if np.any(~np.isfinite(r)) or np.any(r < 0):
        raise ValueError("rates must be finite and nonnegative")
    return r


class _Best:
    """Running minimum across groups, one slot per rate."""

    def __init__(self, k: int):
        self.val = np.full(k, np.inf)
        self.where: list = [None] * k

    def cutoff(self) -> float:
        return float(np.max(self.val))

    def update(self, vals: np.ndarray, locate):
        """``locate(k)`` returns the minimizer description of row ``k`` of ``vals``."""
        j = np.argmin(vals, axis=0)
        v = vals[j, np.arange(vals.shape[1])]
        for r in np.nonzero(v < self.val)[0]:
            self.val[r] = v[r]
            self.where[r] = locate(j[r])


def rc_grid_curve(W, P, rates, score: DecoderScore | None = None, denom: int = 200):
    """Grid random-coding exponent at several rates.

    Returns
    -------
    values : ndarray
    minimizers : list of (Q counts, Qt counts)
    """
    w, p = channel_and_input(W, P)
    r = _rates(rates)
    score = DecoderScore.ml(w) if score is None else score
    if score.tag == "mmi":
        return mmi_grid_curve(w, p, r, denom)
    g = _ChannelGrid(w, p, denom, score_matrix(score, w))
    best = _Best(r.size)
    for gid, h, D, I, A in g.groups(best.cutoff):
        fin = np.nonzero(np.isfinite(D))[0]
        if fin.size == 0:
            continue
        Imin, arg = _segmented_prefix(gid, A, I)
        vals = D[fin, None] + np.maximum(Imin[fin, None] - r[None, :], 0.0)
        best.update(vals, lambda k, h=h, fin=fin, arg=arg: (g.counts(h, fin[k]), g.counts(h, arg[fin[k]])))
    return best.val, best.where


def _single_curve(W, P, rates, denom, fn):
    w, p = channel_and_input(W, P)
    r = _rates(rates)
    g = _ChannelGrid(w, p, denom, None)
    best = _Best(r.size)
    for _, h, D, I, _ in g.groups(best.cutoff):
        fin = np.nonzero(np.isfinite(D))[0]
        if fin.size == 0:
            continue
        vals = fn(D[fin, None], I[fin, None], r[None, :])
        best.update(vals, lambda k, h=h, fin=fin: (g.counts(h, fin[k]), None))
    return best.val, best.where


def mmi_grid_curve(W, P, rates, denom: int = 200):
    """``min D + [I - R]_+`` over joint types."""
    return _single_curve(W, P, rates, denom, lambda D, I, R: D + np.maximum(I - R, 0.0))


def sp_grid_curve(W, P, rates, denom: int = 200):
    """``min {D : I <= R}`` over joint types (``inf`` if no type qualifies)."""
    return _single_curve(W, P, rates, denom, lambda D, I, R: np.where(I <= R + 1e-15, D, np.inf))


def cd_grid_curve(W, P, rates, denom: int = 200):
    """``min D + [R - I]_+`` over joint types."""
    return _single_curve(W, P, rates, denom, lambda D, I, R: D + np.maximum(R - I, 0.0))


def ex_grid_curve(W, P, rates, denom: int = 200):
    """``min {d_B + I : both marginals nP, I <= R} - R`` over pair types."""
    from .primal import bhattacharyya_matrix

    w, p = channel_and_input(W, P)
    r = _rates(rates)
    nx = w.shape[0]
    _check_size(nx, nx, denom)
    rows = round_composition(p, denom)
    C = joint_type_counts(rows, nx)
    C = C[np.all(C.sum(axis=1) == rows[None, :], axis=1)]
    Q = C / denom
    Ph = rows / denom
    d = bhattacharyya_matrix(w)
    dB = np.where(C > 0, Q * np.where(np.isfinite(d), d, 0.0), 0.0).sum(axis=(1, 2))
    dB[((C > 0) & ~np.isfinite(d)[None]).any(axis=(1, 2))] = np.inf
    lut = _xlogx_table(denom)
    I = np.maximum(lut[C].sum(axis=(1, 2)) - 2 * np.sum(lut[rows]), 0.0)
    vals = np.where(I[:, None] <= r[None, :] + 1e-15, dB[:, None] + I[:, None], np.inf) - r[None, :]
    j = np.argmin(vals, axis=0)
    return vals[j, np.arange(r.size)], [(C[k], None) for k in j]


def sw_grid_curve(Pxy, rates, denom: int = 200):
    """Grid binning exponent ``min D(Q||P) + [R - max H_Q'(X|Y)]_+``.

    ``Q'`` ranges over types with the y-marginal of ``Q`` and
    ``g(Q') >= g(Q)``; the inner maximum is a running maximum over the
    group sorted by ``g``.
    """
    P = _joint(Pxy)
    if np.any(P <= 0):
        raise ValueError("binning oracle needs a joint source with full support")
    r = _rates(rates)
    nx, ny = P.shape
    _check_size(nx, ny, denom)
    total = math.comb(denom + nx * ny - 1, nx * ny - 1)
    if total > MAX_TYPES:
        raise OverflowError(f"{total} joint types exceed the {MAX_TYPES} guard")
    C = compositions(denom, nx * ny).reshape(-1, nx, ny)
    Q = C / denom
    lut = _xlogx_table(denom)
    xl = lut[C].sum(axis=(1, 2))
    lnP = np.log(P)
    g = np.log(P / P.sum(axis=0, keepdims=True))
    D = xl - (Q * lnP).sum(axis=(1, 2))
    G = (Q * g).sum(axis=(1, 2))
    m = C.sum(axis=1)
    H = lut[m].sum(axis=1) - xl  # H(X|Y) = H(XY) - H(Y)
    key = np.ravel_multi_index(m.T, (denom + 1,) * ny)
    _, gid = np.unique(key, return_inverse=True)
    Hmax, arg = _segmented_prefix(gid.ravel(), G, H, minimize=False)
    vals = D[:, None] + np.maximum(r[None, :] - Hmax[:, None], 0.0)
    best = _Best(r.size)
    best.update(vals, lambda k: (C[k], C[arg[k]]))
    return best.val, best.where


def rc_exponent_grid(W, P, R: float, score: DecoderScore | None = None, denom: int = 200) -> ExponentResult:
    """Exhaustive joint-type version of :func:`rc_exponent`.

    The minimum over types of denominator ``denom`` upper-bounds the
    continuum value. ``info["lipschitz_bound"]`` reports a crude constant
    ``C0`` such that the discretization gap is at most ``C0 |X||Y| / denom``
    (gradient of the objective on the grid, dominated by ``ln denom``).
    """
    w, p = channel_and_input(W, P)
    vals, where = rc_grid_curve(w, p, [R], score, denom)
    finite_w = w[w > 0]
    c0 = 4.0 + float(np.max(np.abs(np.log(finite_w)))) + 3.0 * math.log(denom)
    info = {"denom": denom, "lipschitz_bound": c0, "gap_bound": c0 * w.size / denom}
    mins = ()
    if where[0] is not None:
        Qc, Qtc = where[0]
        mins = tuple(as_joint(np.asarray(c, dtype=float)) for c in (Qc, Qtc) if c is not None)
    return ExponentResult(float(R), float(vals[0]), mins, "grid", 0.0, info)
