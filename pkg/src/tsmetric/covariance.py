"""Covariance estimators (sample, shrinkage toward the diagonal, diagonal)
and the symmetric pseudoinverse used for rank-deficient estimates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import LabeledDataset, TsMetricError

ESTIMATORS = ("sample", "shrinkage", "diagonal")


class InsufficientSamples(TsMetricError):
    pass


class DegenerateTarget(TsMetricError):
    pass


class ZeroMatrix(TsMetricError):
    pass


class NotPositiveDefinite(TsMetricError):
    pass


@dataclass(frozen=True, eq=False)
class CovarianceEstimate:
    """A covariance estimate and how it was obtained.

    ``matrix`` is n x n for the sample and shrinkage estimators and a
    length-n vector of variances for the diagonal estimator.
    """

    matrix: np.ndarray
    estimator: str
    sample_count: int
    shrink_intensity: Optional[float] = None

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        if self.estimator == "diagonal":
            return np.diag(self.matrix)
        return self.matrix


@dataclass(frozen=True, eq=False)
class PseudoInverseResult:
    matrix: np.ndarray
    rank: int
    pseudo_det: float
    log_pseudo_det: float


def symmetrize(a: np.ndarray) -> np.ndarray:
    return (a + a.T) / 2.0


def _data(d) -> np.ndarray:
    X = d.X if isinstance(d, LabeledDataset) else np.asarray(d, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("expected a 2-D array of instances by attributes")
    if X.shape[0] < 2:
        raise InsufficientSamples(
            f"need at least 2 instances to estimate a covariance, got {X.shape[0]}"
        )
    return X


def _centered(X: np.ndarray) -> np.ndarray:
    return X - X.mean(axis=0)


def _variances(Xc: np.ndarray, m: int) -> np.ndarray:
    # shared by the sample and diagonal estimators so their diagonals agree bit for bit
    return np.einsum("ki,ki->i", Xc, Xc) / (m - 1)


def sample_covariance(d) -> CovarianceEstimate:
    """Unbiased sample covariance (divisor m - 1) over the rows of ``d``."""
    X = _data(d)
    m = X.shape[0]
    Xc = _centered(X)
    S = symmetrize(Xc.T @ Xc / (m - 1))
    S[np.diag_indices_from(S)] = _variances(Xc, m)
    return CovarianceEstimate(S, "sample", m)


def diagonal_covariance(d) -> CovarianceEstimate:
    X = _data(d)
    m = X.shape[0]
    return CovarianceEstimate(_variances(_centered(X), m), "diagonal", m)


def estimate_shrink_intensity(d) -> float:
    """Closed-form intensity for shrinking toward diag(S).

    lambda = sum_{i != j} Var(s_ij) / sum_{i != j} s_ij**2, clipped to
    [0, 1], with Var(s_ij) = m / (m-1)**3 * sum_k (w_kij - mean_k w_kij)**2
    and w_kij the product of centered attributes i and j of instance k.
    A zero denominator gives lambda = 1.
    """
    X = _data(d)
    m = X.shape[0]
    Xc = _centered(X)
    # sum_k (w_kij - wbar_ij)^2 = sum_k w_kij^2 - m * wbar_ij^2
    W1 = Xc.T @ Xc
    Xc2 = Xc * Xc
    W2 = Xc2.T @ Xc2
    ss = W2 - W1 * W1 / m
    np.maximum(ss, 0.0, out=ss)
    var_s = m / (m - 1) ** 3 * ss
    S = W1 / (m - 1)

    off = ~np.eye(X.shape[1], dtype=bool)
    denom = float(np.sum(S[off] ** 2))
    if denom == 0.0:
        return 1.0
    lam = float(np.sum(var_s[off])) / denom
    return float(min(1.0, max(0.0, lam)))


def shrinkage_covariance(d, intensity: Optional[float] = None) -> CovarianceEstimate:
    """C* = lam * diag(S) + (1 - lam) * S.

    ``intensity`` overrides the estimated lambda. Raises DegenerateTarget
    if some attribute has zero sample variance.
    """
    S = sample_covariance(d)
    diag = np.diag(S.matrix).copy()
    if np.any(diag <= 0.0):
        bad = np.flatnonzero(diag <= 0.0)
        raise DegenerateTarget(
            f"{bad.size} attribute(s) with zero variance, first at index {bad[0]}"
        )
    lam = estimate_shrink_intensity(d) if intensity is None else float(intensity)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"shrink intensity must lie in [0, 1], got {lam}")
    C = (1.0 - lam) * S.matrix
    # target shares the diagonal, so keep it exactly
    C[np.diag_indices_from(C)] = diag
    return CovarianceEstimate(symmetrize(C), "shrinkage", S.sample_count, lam)


def default_rank_tol(n: int) -> float:
    return n * np.finfo(np.float64).eps


def pseudo_inverse(c, rank_tol: Optional[float] = None) -> PseudoInverseResult:
    """Moore-Penrose pseudoinverse of a symmetric PSD matrix, rescaled so
    the product of its nonzero eigenvalues is one.

    Eigenvalues <= ``rank_tol * max_eigenvalue`` count as zero.
    """
    C = c.dense() if isinstance(c, CovarianceEstimate) else np.asarray(c, dtype=np.float64)
    n = C.shape[0]
    if rank_tol is None:
        rank_tol = default_rank_tol(n)
    w, V = np.linalg.eigh(symmetrize(C))
    top = float(np.max(np.abs(w))) if w.size else 0.0
    keep = w > rank_tol * top
    if top == 0.0 or not np.any(keep):
        raise ZeroMatrix("all eigenvalues are zero within tolerance")
    wk = w[keep]
    Vk = V[:, keep]
    log_pdet = float(np.sum(np.log(wk)))
    r = int(wk.size)
    # nonzero eigenvalues of M are scale / wk; their product is 1 when
    # scale = pdet ** (1 / r)
    scale = np.exp(log_pdet / r)
    M = symmetrize((Vk * (scale / wk)) @ Vk.T)
    return PseudoInverseResult(M, r, float(np.exp(log_pdet)), log_pdet)


def raw_pseudo_inverse(c, rank_tol: Optional[float] = None) -> np.ndarray:
    """Unnormalized pseudoinverse V diag(1/w) V^T with 1/0 = 0."""
    C = c.dense() if isinstance(c, CovarianceEstimate) else np.asarray(c, dtype=np.float64)
    n = C.shape[0]
    if rank_tol is None:
        rank_tol = default_rank_tol(n)
    w, V = np.linalg.eigh(symmetrize(C))
    top = float(np.max(np.abs(w))) if w.size else 0.0
    keep = w > rank_tol * top
    if top == 0.0 or not np.any(keep):
        raise ZeroMatrix("all eigenvalues are zero within tolerance")
    return symmetrize((V[:, keep] / w[keep]) @ V[:, keep].T)


def log_determinant(c) -> float:
    """Log-determinant of a positive definite estimate via Cholesky."""
    if isinstance(c, CovarianceEstimate) and c.estimator == "diagonal":
        v = c.matrix
        if np.any(v <= 0.0):
            raise NotPositiveDefinite("diagonal estimate has nonpositive variance")
        return float(np.sum(np.log(v)))
    C = c.dense() if isinstance(c, CovarianceEstimate) else np.asarray(c, dtype=np.float64)
    try:
        L = np.linalg.cholesky(symmetrize(C))
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    return float(2.0 * np.sum(np.log(np.diag(L))))


def estimate(d, estimator: str) -> CovarianceEstimate:
    if estimator == "sample":
        return sample_covariance(d)
    if estimator == "shrinkage":
        return shrinkage_covariance(d)
    if estimator == "diagonal":
        return diagonal_covariance(d)
    raise ValueError(f"unknown estimator {estimator!r}; choose from {ESTIMATORS}")
