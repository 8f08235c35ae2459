"""Shared containers and helpers for the exponent calculators."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import rel_entr

from ..types_core import Channel, Dist, JointDist, _probs, _rows

__all__ = [
    "DecoderScore",
    "ExponentResult",
    "DualParams",
    "ExponentSolverError",
]


class ExponentSolverError(RuntimeError):
    """A convex solve did not reach an optimal, feasible point."""


@dataclass(frozen=True, eq=False)
class DecoderScore:
    """Additive decoding metric ``alpha(x, y)`` (nats per symbol).

    ``tag="ml"`` binds ``alpha = ln W`` (``-inf`` on zeros of ``W``);
    ``"mmi"`` is the empirical mutual information and carries no matrix;
    ``"custom-linear"`` takes a finite user matrix.
    """

    coeffs: Optional[np.ndarray]
    tag: str

    def __post_init__(self):
        if self.tag not in ("ml", "mmi", "custom-linear"):
            raise ValueError(f"unknown decoder tag {self.tag!r}")
        if self.tag == "mmi":
            return
        a = np.asarray(self.coeffs, dtype=float)
        if a.ndim != 2:
            raise ValueError("decoder coefficients must be a matrix")
        if self.tag == "custom-linear" and not np.all(np.isfinite(a)):
            raise ValueError("custom-linear scores must be finite")
        if np.any(np.isnan(a)) or np.any(a == np.inf):
            raise ValueError("score entries must be real or -inf")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "coeffs", a)

    @classmethod
    def ml(cls, W) -> "DecoderScore":
        w = _rows(W)
        with np.errstate(divide="ignore"):
            return cls(np.log(w), "ml")

    @classmethod
    def mmi(cls) -> "DecoderScore":
        return cls(None, "mmi")

    @classmethod
    def linear(cls, coeffs) -> "DecoderScore":
        return cls(np.asarray(coeffs, dtype=float), "custom-linear")

    @property
    def linear_form(self) -> bool:
        return self.tag != "mmi"

    def value(self, Q: np.ndarray) -> float:
        """``alpha(Q) = sum Q(x,y) alpha(x,y)`` with ``0 * -inf = 0``."""
        if self.tag == "mmi":
            prod = np.outer(Q.sum(axis=1), Q.sum(axis=0))
            return float(rel_entr(Q, prod).sum())
        a = self.coeffs
        if np.any((Q > 0) & ~np.isfinite(a)):
            return -np.inf
        return float(np.sum(np.where(Q > 0, Q * np.where(np.isfinite(a), a, 0.0), 0.0)))


@dataclass(frozen=True, eq=False)
class ExponentResult:
    """One point of an exponent curve.

    Attributes
    ----------
    rate : float
        Rate in nats per channel use (or per source symbol).
    value : float
        Exponent in nats.
    minimizers : tuple of JointDist
        Optimal joint distribution(s); empty when not applicable.
    method : str
        ``"primal-convex"``, ``"grid"``, ``"dual"`` or ``"closed-form"``.
    residual : float
        Largest constraint violation at the returned minimizers.
    info : dict
        Extra diagnostics (critical rate, branch, solver status).
    """

    rate: float
    value: float
    minimizers: tuple = ()
    method: str = "primal-convex"
    residual: float = 0.0
    info: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class DualParams:
    """Dual variables: ``rho`` in ``[0, 1]``, ``lam >= 0`` and ``nu(y)``."""

    rho: float
    lam: float
    nu: np.ndarray

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [0, 1]")
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")
        nu = np.asarray(self.nu, dtype=float)
        if nu.ndim != 1 or not np.all(np.isfinite(nu)):
            raise ValueError("nu must be a finite vector over the output alphabet")
        object.__setattr__(self, "nu", nu)


def channel_and_input(W, P) -> tuple[np.ndarray, np.ndarray]:
    w, p = _rows(W), _probs(P)
    if p.size != w.shape[0]:
        raise ValueError(f"input distribution has {p.size} letters, channel has {w.shape[0]} rows")
    return w, p


def score_matrix(score: DecoderScore, W: np.ndarray) -> np.ndarray:
    if score.tag == "mmi":
        raise ValueError("mmi is not a linear score")
    a = score.coeffs
    if a.shape != W.shape:
        raise ValueError(f"score shape {a.shape} does not match channel {W.shape}")
    if score.tag == "ml":
        with np.errstate(divide="ignore"):
            expect = np.log(W)
        both = np.isfinite(expect) & np.isfinite(a)
        if np.any(np.isfinite(a) != np.isfinite(expect)) or \
                not np.allclose(a[both], expect[both], atol=1e-12):
            raise ValueError("ml score does not match ln W of this channel")
    return a


def joint(P: np.ndarray, cond: np.ndarray) -> np.ndarray:
    return P[:, None] * cond


def divergence(Q: np.ndarray, ref: np.ndarray) -> float:
    return float(rel_entr(Q, ref).sum())


def mi_fixed_x(Q: np.ndarray) -> float:
    prod = np.outer(Q.sum(axis=1), Q.sum(axis=0))
    return max(float(rel_entr(Q, prod).sum()), 0.0)


def cond_entropy_x_given_y(Q: np.ndarray) -> float:
    qy = Q.sum(axis=0, keepdims=True)
    return -float(rel_entr(Q, np.broadcast_to(qy, Q.shape)).sum())


def as_joint(Q: np.ndarray) -> JointDist:
    q = np.clip(Q, 0.0, None)
    return JointDist(q / q.sum())
