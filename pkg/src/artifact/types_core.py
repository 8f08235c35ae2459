"""Finite-alphabet distributions, information measures and type combinatorics.

All logarithms are natural, so every entropy, divergence and rate is in nats.
The usual conventions ``0 ln 0 = 0`` and ``q ln(q/0) = +inf`` hold throughout.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import entr, gammaln, rel_entr

__all__ = [
    "PROB_TOL",
    "Dist",
    "JointDist",
    "Channel",
    "TypeVector",
    "entropy",
    "binary_entropy",
    "kl_divergence",
    "binary_kl",
    "mutual_information",
    "conditional_divergence",
    "log_type_class_size",
    "compositions",
    "joint_type_counts",
    "enumerate_joint_types",
    "MAX_TYPES",
]

PROB_TOL = 1e-9
MAX_TYPES = 10**7


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dist:
    """Probability vector over a finite alphabet."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size < 1:
            raise ValueError("Dist needs a non-empty 1-D vector")
        if np.any(~np.isfinite(p)) or np.any(p < 0):
            raise ValueError("Dist entries must be finite and nonnegative")
        if abs(p.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"Dist entries sum to {p.sum():.12g}, not 1")
        object.__setattr__(self, "probs", _frozen(p))

    @property
    def size(self) -> int:
        return self.probs.size

    @classmethod
    def uniform(cls, k: int) -> "Dist":
        return cls(np.full(k, 1.0 / k))


@dataclass(frozen=True, eq=False)
class JointDist:
    """Joint probability matrix ``Q[x, y]``."""

    probs: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.probs, dtype=float)
        if q.ndim != 2 or q.size < 1:
            raise ValueError("JointDist needs a non-empty matrix")
        if np.any(~np.isfinite(q)) or np.any(q < 0):
            raise ValueError("JointDist entries must be finite and nonnegative")
        if abs(q.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"JointDist entries sum to {q.sum():.12g}, not 1")
        object.__setattr__(self, "probs", _frozen(q))

    @property
    def marginal_x(self) -> np.ndarray:
        return self.probs.sum(axis=1)

    @property
    def marginal_y(self) -> np.ndarray:
        return self.probs.sum(axis=0)

    def conditional(self) -> np.ndarray:
        """Rows ``Q(y|x)``; rows with zero mass are left uniform."""
        px = self.marginal_x
        out = np.full_like(self.probs, 1.0 / self.probs.shape[1])
        nz = px > 0
        out[nz] = self.probs[nz] / px[nz, None]
        return out

    @classmethod
    def from_channel(cls, P: "Dist | ArrayLike", W: "Channel | ArrayLike") -> "JointDist":
        p = _probs(P)
        w = _rows(W)
        return cls(p[:, None] * w)


@dataclass(frozen=True, eq=False)
class Channel:
    """Row-stochastic matrix ``W[x, y] = W(y|x)``."""

    rows: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.rows, dtype=float)
        if w.ndim != 2 or w.size < 1:
            raise ValueError("Channel needs a non-empty matrix")
        if np.any(~np.isfinite(w)) or np.any(w < 0):
            raise ValueError("Channel entries must be finite and nonnegative")
        bad = np.flatnonzero(np.abs(w.sum(axis=1) - 1.0) > PROB_TOL)
        if bad.size:
            raise ValueError(f"Channel row {bad[0]} sums to {w[bad[0]].sum():.12g}, not 1")
        object.__setattr__(self, "rows", _frozen(w))

    @property
    def nx(self) -> int:
        return self.rows.shape[0]

    @property
    def ny(self) -> int:
        return self.rows.shape[1]

    @classmethod
    def bsc(cls, p: float) -> "Channel":
        return cls(np.array([[1 - p, p], [p, 1 - p]]))


@dataclass(frozen=True, eq=False)
class TypeVector:
    """Composition (letter counts) of a length-``n`` sequence."""

    counts: np.ndarray
    n: int

    def __post_init__(self):
        c = np.asarray(self.counts)
        if c.ndim != 1 or c.size < 1:
            raise ValueError("TypeVector needs a non-empty 1-D count vector")
        if not np.all(np.equal(np.mod(c, 1), 0)) or np.any(c < 0):
            raise ValueError("TypeVector counts must be nonnegative integers")
        c = c.astype(np.int64)
        if int(c.sum()) != int(self.n):
            raise ValueError(f"counts sum to {int(c.sum())}, expected n={self.n}")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def from_counts(cls, counts: ArrayLike) -> "TypeVector":
        c = np.asarray(counts)
        return cls(c, int(np.sum(c)))

    def dist(self) -> Dist:
        return Dist(self.counts / self.n)


DistLike = Union[Dist, ArrayLike]
ChannelLike = Union[Channel, ArrayLike]
JointLike = Union[JointDist, ArrayLike]


def _probs(q: DistLike) -> np.ndarray:
    return q.probs if isinstance(q, Dist) else Dist(q).probs


def _joint(Q: JointLike) -> np.ndarray:
    return Q.probs if isinstance(Q, JointDist) else JointDist(Q).probs


def _rows(W: ChannelLike) -> np.ndarray:
    return W.rows if isinstance(W, Channel) else Channel(W).rows


def entropy(q: DistLike) -> float:
    """Shannon entropy ``-sum q ln q``."""
    return float(entr(_probs(q)).sum())


def binary_entropy(q: float) -> float:
    """Binary entropy ``H(q)`` in nats."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"binary_entropy needs q in [0, 1], got {q}")
    return float(entr(q) + entr(1.0 - q))


def kl_divergence(q: DistLike, p: DistLike) -> float:
    """``D(q||p)``; ``+inf`` when ``q`` charges a zero of ``p``."""
    qa, pa = _probs(q), _probs(p)
    if qa.shape != pa.shape:
        raise ValueError(f"alphabet mismatch: {qa.size} vs {pa.size}")
    return float(rel_entr(qa, pa).sum())


def binary_kl(a: float, b: float) -> float:
    """Binary divergence ``D(a||b) = a ln(a/b) + (1-a) ln((1-a)/(1-b))``."""
    if not (0.0 <= a <= 1.0 and 0.0 <= b <= 1.0):
        raise ValueError(f"binary_kl needs a, b in [0, 1], got {a}, {b}")
    return float(rel_entr(a, b) + rel_entr(1.0 - a, 1.0 - b))


def mutual_information(Q: JointLike) -> float:
    """``I(X;Y)`` of a joint matrix."""
    q = _joint(Q)
    prod = np.outer(q.sum(axis=1), q.sum(axis=0))
    return max(float(rel_entr(q, prod).sum()), 0.0)


def conditional_divergence(Qc: ChannelLike, W: ChannelLike, P: DistLike) -> float:
    """``D(Qc||W|P) = sum_x P(x) D(Qc(.|x)||W(.|x))``.

    Rows outside the support of ``P`` do not contribute.
    """
    qc, w, p = _rows(Qc), _rows(W), _probs(P)
    if qc.shape != w.shape or p.size != w.shape[0]:
        raise ValueError(f"alphabet mismatch: {qc.shape}, {w.shape}, {p.size}")
    per_row = rel_entr(qc, w).sum(axis=1)
    on = p > 0
    return float(np.dot(p[on], per_row[on]))


def log_type_class_size(t: TypeVector | ArrayLike) -> float:
    """Natural log of the multinomial ``n! / prod_i counts_i!``.

    Exact integer arithmetic is used up to ``n = 64``; beyond that the
    log-gamma route is accurate to a few ulps of the result.
    """
    if not isinstance(t, TypeVector):
        t = TypeVector.from_counts(t)
    c = t.counts
    if t.n <= 64:
        num = math.factorial(t.n)
        for k in c:
            num //= math.factorial(int(k))
        return math.log(num)
    return float(gammaln(t.n + 1) - gammaln(c + 1.0).sum())


def compositions(m: int, k: int) -> np.ndarray:
    """All ``k``-part compositions of ``m`` into nonnegative integers.

    Returns an ``(C(m+k-1, k-1), k)`` integer array in lexicographic order
    of the bar positions.
    """
    if k < 1 or m < 0:
        raise ValueError("need k >= 1 and m >= 0")
    if k == 1:
        return np.array([[m]], dtype=np.int64)
    count = math.comb(m + k - 1, k - 1)
    if count > MAX_TYPES:
        raise OverflowError(f"{count} compositions exceed the {MAX_TYPES} guard")
    bars = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(m + k - 1), k - 1)),
        dtype=np.int64,
        count=count * (k - 1),
    ).reshape(count, k - 1)
    edges = np.hstack([np.full((count, 1), -1), bars, np.full((count, 1), m + k - 1)])
    return np.diff(edges, axis=1) - 1


def joint_type_counts(nx: TypeVector | ArrayLike, ny: int) -> np.ndarray:
    """Count matrices of all joint types with row sums ``nx``.

    Returns an integer array of shape ``(K, len(nx), ny)``.
    """
    if not isinstance(nx, TypeVector):
        nx = TypeVector.from_counts(nx)
    rows = [compositions(int(c), ny) for c in nx.counts]
    total = math.prod(r.shape[0] for r in rows)
    if total > MAX_TYPES:
        raise OverflowError(f"{total} joint types exceed the {MAX_TYPES} guard")
    grids = np.meshgrid(*[np.arange(r.shape[0]) for r in rows], indexing="ij")
    idx = [g.ravel() for g in grids]
    return np.stack([r[i] for r, i in zip(rows, idx)], axis=1)


def enumerate_joint_types(nx: TypeVector | ArrayLike, ny: int) -> list[JointDist]:
    """Every joint type with x-composition ``nx`` and denominator ``n``."""
    if not isinstance(nx, TypeVector):
        nx = TypeVector.from_counts(nx)
    counts = joint_type_counts(nx, ny)
    return [JointDist(c / nx.n) for c in counts]
