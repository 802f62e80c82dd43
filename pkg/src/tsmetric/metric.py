"""Generalized ellipsoid distances D(x, y) = (x - y)^T M (x - y)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import cho_solve

from .core import DimensionMismatch
from .covariance import (
    CovarianceEstimate,
    NotPositiveDefinite,
    log_determinant,
    pseudo_inverse,
    symmetrize,
)

FORMS = ("full", "diagonal", "identity")
NORMALIZATIONS = ("unit_determinant", "raw_inverse")

# floating-point noise below this is clamped to zero
NEG_CLAMP = 1e-9


@dataclass(frozen=True, eq=False)
class EllipsoidMetric:
    """PSD quadratic form. ``weights`` holds an n x n matrix for the full
    form, a length-n vector for the diagonal form and is None for identity."""

    form: str
    n: int
    weights: Optional[np.ndarray] = None
    normalization: str = "unit_determinant"
    rank: Optional[int] = None

    @classmethod
    def identity(cls, n: int) -> "EllipsoidMetric":
        return cls("identity", n)

    def dense(self) -> np.ndarray:
        if self.form == "identity":
            return np.eye(self.n)
        if self.form == "diagonal":
            return np.diag(self.weights)
        return self.weights

    def __call__(self, x, y) -> float:
        return distance(self, x, y)


def _unit_scale(logdet: float, n: int) -> float:
    return float(np.exp(logdet / n))


def _diag_metric(variances: np.ndarray, normalization: str, ignore_zero: bool) -> EllipsoidMetric:
    v = np.asarray(variances, dtype=np.float64)
    pos = v > 0.0
    if not np.all(pos):
        if not ignore_zero:
            raise NotPositiveDefinite(
                f"{int(np.sum(~pos))} attribute(s) with nonpositive variance"
            )
        if not np.any(pos):
            raise NotPositiveDefinite("every attribute has zero variance")
    w = np.zeros_like(v)
    w[pos] = 1.0 / v[pos]
    if normalization == "unit_determinant":
        # geometric mean of the positive variances, in the log domain
        w *= np.exp(np.mean(np.log(v[pos])))
    return EllipsoidMetric("diagonal", v.size, w, normalization, int(np.sum(pos)))


def metric_from_covariance(
    c: CovarianceEstimate,
    estimator: Optional[str] = None,
    normalization: str = "unit_determinant",
    *,
    ignore_zero_variance: bool = False,
    rank_tol: Optional[float] = None,
) -> EllipsoidMetric:
    """Turn a covariance estimate into a Mahalanobis-type metric.

    ``estimator`` is one of ``shrinkage``, ``diagonal`` or ``pseudoinverse``
    and defaults to the estimate's own provenance. With
    ``normalization="unit_determinant"`` the metric is scaled to det(M) = 1
    (unit pseudo-determinant for the pseudoinverse, which ignores
    ``normalization`` since no other scale is meaningful for a singular M).
    ``ignore_zero_variance`` lets the diagonal form give zero weight to
    constant attributes instead of raising NotPositiveDefinite.
    """
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {normalization!r}")
    if estimator is None:
        estimator = c.estimator
    if estimator == "pseudoinverse":
        p = pseudo_inverse(c, rank_tol)
        return EllipsoidMetric("full", p.matrix.shape[0], p.matrix, "unit_determinant", p.rank)
    if estimator == "diagonal":
        v = c.matrix if c.estimator == "diagonal" else np.diag(c.matrix)
        return _diag_metric(v, normalization, ignore_zero_variance)
    if estimator in ("shrinkage", "sample"):
        C = symmetrize(c.dense())
        n = C.shape[0]
        try:
            L = np.linalg.cholesky(C)
        except np.linalg.LinAlgError:
            raise NotPositiveDefinite("covariance estimate is not positive definite") from None
        M = symmetrize(cho_solve((L, True), np.eye(n)))
        if normalization == "unit_determinant":
            logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
            M = M * _unit_scale(logdet, n)
        return EllipsoidMetric("full", n, M, normalization, n)
    raise ValueError(f"unknown estimator {estimator!r}")


def _check(m: EllipsoidMetric, x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != (m.n,) or y.shape != (m.n,):
        raise DimensionMismatch(
            f"metric has dimension {m.n}, got series of shapes {x.shape} and {y.shape}"
        )
    return x, y


def euclidean_sq(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise DimensionMismatch(f"series lengths differ: {x.shape} vs {y.shape}")
    d = x - y
    return float(np.dot(d, d))


def _clamp(v: float) -> float:
    if v < 0.0 and v > -NEG_CLAMP:
        return 0.0
    return v


def distance(m: EllipsoidMetric, x, y) -> float:
    """(x - y)^T M (x - y); O(n) for diagonal and identity forms."""
    x, y = _check(m, x, y)
    if m.form == "identity":
        return euclidean_sq(x, y)
    d = x - y
    if m.form == "diagonal":
        return float(np.dot(m.weights * d, d))
    return _clamp(float(np.dot(d, m.weights @ d)))


def log_det_metric(m: EllipsoidMetric) -> float:
    """log det(M) of a nonsingular metric."""
    if m.form == "identity":
        return 0.0
    if m.form == "diagonal":
        return log_determinant(CovarianceEstimate(m.weights, "diagonal", 0))
    return log_determinant(m.weights)
