"""1-NN classification under Euclidean, DTW and learned Mahalanobis distances."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numba as nb
import numpy as np

from .core import DimensionMismatch, LabeledDataset, TsMetricError, class_partition
from .covariance import (
    DegenerateTarget,
    InsufficientSamples,
    NotPositiveDefinite,
    ZeroMatrix,
    diagonal_covariance,
    sample_covariance,
    shrinkage_covariance,
)
from .dtw import nn_dtw
from .io import z_normalize_dataset
from .metric import NEG_CLAMP, NORMALIZATIONS, EllipsoidMetric, metric_from_covariance
from .synth import FAMILIES, GeneratorSpec, UnknownGenerator, derive_seed, generate

log = logging.getLogger(__name__)

KINDS = ("euclidean", "dtw", "mahalanobis")
MAHALANOBIS_ESTIMATORS = ("shrinkage", "diagonal", "pseudoinverse")
LOCALITIES = ("global", "class_based")

# queries per work unit; fixed so results never depend on the worker count
CHUNK = 64

_LOCALITY_ALIASES = {"global": "global", "class": "class_based", "class_based": "class_based",
                     "cb": "class_based", "classbased": "class_based"}
_NORM_ALIASES = {"unit": "unit_determinant", "unit_determinant": "unit_determinant",
                 "det": "unit_determinant", "raw": "raw_inverse", "raw_inverse": "raw_inverse"}

_FALLBACK_ERRORS = (InsufficientSamples, DegenerateTarget, NotPositiveDefinite, ZeroMatrix)


class InvalidSpec(TsMetricError):
    pass


@dataclass(frozen=True)
class DistanceSpec:
    kind: str
    estimator: Optional[str] = None
    locality: Optional[str] = None
    normalization: str = "unit_determinant"
    band: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown distance kind {self.kind!r}")
        if self.band is not None and self.kind != "dtw":
            raise InvalidSpec("a warping band only applies to dtw")
        if self.kind == "mahalanobis":
            if self.estimator not in MAHALANOBIS_ESTIMATORS:
                raise InvalidSpec(f"unknown estimator {self.estimator!r}")
            if self.locality not in LOCALITIES:
                raise InvalidSpec(f"unknown locality {self.locality!r}")
            if self.normalization not in NORMALIZATIONS:
                raise InvalidSpec(f"unknown normalization {self.normalization!r}")
        elif self.estimator is not None or self.locality is not None:
            raise InvalidSpec(f"{self.kind} takes no estimator or locality")

    @classmethod
    def parse(cls, text: str) -> "DistanceSpec":
        """Parse ``euclidean``, ``dtw``, ``dtw:band=10`` or
        ``mahalanobis:<estimator>:<global|class>[:<unit|raw>]``."""
        parts = [p.strip() for p in text.strip().lower().split(":") if p.strip()]
        if not parts:
            raise InvalidSpec("empty distance spec")
        kind, rest = parts[0], parts[1:]
        if kind in ("euclid", "ed"):
            kind = "euclidean"
        if kind == "euclidean":
            if rest:
                if any(p.startswith("band") for p in rest):
                    raise InvalidSpec("a warping band only applies to dtw")
                raise InvalidSpec(f"euclidean takes no options: {text!r}")
            return cls("euclidean")
        if kind == "dtw":
            band = None
            for p in rest:
                key, _, value = p.partition("=")
                if key not in ("band", "window", "r") or not value:
                    raise InvalidSpec(f"bad dtw option {p!r}")
                try:
                    band = int(value)
                except ValueError:
                    raise InvalidSpec(f"band must be an integer, got {value!r}") from None
                if band < 0:
                    raise InvalidSpec("band must be >= 0")
            return cls("dtw", band=band)
        if kind in ("mahalanobis", "maha"):
            if len(rest) < 2 or len(rest) > 3:
                raise InvalidSpec(f"expected mahalanobis:<estimator>:<locality>[:<norm>], got {text!r}")
            estimator = {"shrink": "shrinkage", "diag": "diagonal", "pinv": "pseudoinverse"}.get(rest[0], rest[0])
            locality = _LOCALITY_ALIASES.get(rest[1])
            if locality is None:
                raise InvalidSpec(f"unknown locality {rest[1]!r}")
            norm = "unit_determinant"
            if len(rest) == 3:
                key, _, value = rest[2].partition("=")
                norm = _NORM_ALIASES.get(value if key == "norm" else key)
                if norm is None:
                    raise InvalidSpec(f"unknown normalization {rest[2]!r}")
            return cls("mahalanobis", estimator, locality, norm)
        raise InvalidSpec(f"unknown distance kind {kind!r}")

    def __str__(self) -> str:
        if self.kind == "euclidean":
            return "euclidean"
        if self.kind == "dtw":
            return "dtw" if self.band is None else f"dtw:band={self.band}"
        loc = "class" if self.locality == "class_based" else "global"
        norm = "unit" if self.normalization == "unit_determinant" else "raw"
        return f"mahalanobis:{self.estimator}:{loc}:{norm}"


@dataclass(frozen=True)
class FallbackEntry:
    label: Optional[int]
    reason: str
    message: str


@dataclass(frozen=True, eq=False)
class DistanceModel:
    spec: DistanceSpec
    n: int
    metric: Optional[EllipsoidMetric] = None
    class_metrics: Optional[dict] = None
    fallback_log: tuple = ()

    def metric_for(self, label: int) -> EllipsoidMetric:
        if self.class_metrics is not None:
            return self.class_metrics[label]
        return self.metric


@dataclass
class EvaluationReport:
    spec: str
    error_rate: float
    n_test: int
    n_errors: int
    per_class_errors: dict
    wall_time: float
    predictions: np.ndarray = field(repr=False, default=None)
    fallback_log: tuple = ()


def _as_spec(spec: Union[str, DistanceSpec]) -> DistanceSpec:
    return spec if isinstance(spec, DistanceSpec) else DistanceSpec.parse(spec)


def _learn_metric(spec: DistanceSpec, d: LabeledDataset) -> EllipsoidMetric:
    if spec.estimator == "shrinkage":
        c = shrinkage_covariance(d)
    elif spec.estimator == "diagonal":
        c = diagonal_covariance(d)
    else:
        c = sample_covariance(d)
    return metric_from_covariance(
        c, spec.estimator, spec.normalization, ignore_zero_variance=True
    )


def fit(spec: Union[str, DistanceSpec], train: LabeledDataset) -> DistanceModel:
    """Learn the metric(s) a spec needs from ``train``.

    Estimator failures (too few instances, zero variances, singular
    estimates) fall back to the identity metric for that class and are
    recorded in ``fallback_log``.
    """
    spec = _as_spec(spec)
    n = train.series_length
    if spec.kind != "mahalanobis":
        return DistanceModel(spec, n)

    fallbacks = []

    def learn(label, d):
        try:
            return _learn_metric(spec, d)
        except _FALLBACK_ERRORS as exc:
            entry = FallbackEntry(label, type(exc).__name__, str(exc))
            fallbacks.append(entry)
            log.info("identity fallback for class %s: %s", label, entry.reason)
            return EllipsoidMetric.identity(n)

    if spec.locality == "global":
        return DistanceModel(spec, n, metric=learn(None, train), fallback_log=tuple(fallbacks))
    metrics = {label: learn(label, part) for label, part in class_partition(train).items()}
    return DistanceModel(spec, n, class_metrics=metrics, fallback_log=tuple(fallbacks))


@nb.njit(cache=True, nogil=True)
def _weighted_sq(Q, T, w):
    nq, nt, n = Q.shape[0], T.shape[0], Q.shape[1]
    out = np.empty((nq, nt))
    for a in range(nq):
        for b in range(nt):
            s = 0.0
            for k in range(n):
                d = Q[a, k] - T[b, k]
                s += w[k] * (d * d)
            out[a, b] = s
    return out


def _block(metric: EllipsoidMetric, Q: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Distances from every row of Q to every row of T under ``metric``."""
    if metric.form == "identity":
        return _weighted_sq(Q, T, np.ones(Q.shape[1]))
    if metric.form == "diagonal":
        return _weighted_sq(Q, T, metric.weights)
    D = Q[:, None, :] - T[None, :, :]
    flat = D.reshape(-1, Q.shape[1])
    out = np.einsum("ij,ij->i", flat @ metric.weights, flat).reshape(Q.shape[0], T.shape[0])
    out[(out < 0.0) & (out > -NEG_CLAMP)] = 0.0
    return out


def _nearest_chunk(model: DistanceModel, train: LabeledDataset, Q: np.ndarray) -> np.ndarray:
    spec = model.spec
    if spec.kind == "dtw":
        band = -1 if spec.band is None else spec.band
        idx, _ = nn_dtw(Q, np.ascontiguousarray(train.X), band)
        return idx
    if spec.kind == "euclidean":
        dist = _block(EllipsoidMetric.identity(model.n), Q, train.X)
    elif model.class_metrics is None:
        dist = _block(model.metric, Q, train.X)
    else:
        dist = np.empty((Q.shape[0], len(train)))
        for label, metric in model.class_metrics.items():
            cols = np.flatnonzero(train.y == label)
            dist[:, cols] = _block(metric, Q, np.ascontiguousarray(train.X[cols]))
    # argmin returns the first minimum: ties go to the lowest training index
    return np.argmin(dist, axis=1)


def nearest_neighbors(model: DistanceModel, train: LabeledDataset, Q, workers: int = 1) -> np.ndarray:
    """Training index of the nearest neighbour of each row of Q."""
    Q = np.ascontiguousarray(Q, dtype=np.float64)
    if Q.ndim == 1:
        Q = Q.reshape(1, -1)
    if Q.shape[1] != train.series_length or model.n != train.series_length:
        raise DimensionMismatch(
            f"queries have length {Q.shape[1]}, training series {train.series_length}"
        )
    chunks = [Q[i : i + CHUNK] for i in range(0, Q.shape[0], CHUNK)]
    if workers is None or workers <= 1 or len(chunks) == 1:
        parts = [_nearest_chunk(model, train, c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _nearest_chunk(model, train, c), chunks))
    return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)


def classify(model: DistanceModel, train: LabeledDataset, q) -> int:
    q = np.asarray(q, dtype=np.float64)
    if q.ndim != 1:
        raise DimensionMismatch("classify takes a single series")
    return int(train.y[nearest_neighbors(model, train, q)[0]])


def predict(model: DistanceModel, train: LabeledDataset, Q, workers: int = 1) -> np.ndarray:
    return train.y[nearest_neighbors(model, train, Q, workers)]


def evaluate(
    spec: Union[str, DistanceSpec],
    train: LabeledDataset,
    test: LabeledDataset,
    workers: int = 1,
) -> EvaluationReport:
    """Fit on ``train`` and report the 1-NN error on ``test``."""
    spec = _as_spec(spec)
    if train.series_length != test.series_length:
        raise DimensionMismatch(
            f"train length {train.series_length} differs from test length {test.series_length}"
        )
    t0 = time.perf_counter()
    model = fit(spec, train)
    pred = predict(model, train, test.X, workers)
    wall = time.perf_counter() - t0
    wrong = pred != test.y
    per_class = {label: int(np.sum(wrong & (test.y == label))) for label in test.labels}
    n_err = int(np.sum(wrong))
    return EvaluationReport(
        str(spec), n_err / len(test), len(test), n_err, per_class, wall, pred, model.fallback_log
    )


@dataclass(frozen=True)
class CurveRow:
    family: str
    train_size: int
    repeat: int
    spec: str
    error_rate: float

    @property
    def accuracy(self) -> float:
        return 1.0 - self.error_rate


CURVE_SPECS = ("euclidean", "mahalanobis:diagonal:class")


def learning_curve(
    generator_id: str,
    train_sizes: Sequence[int],
    n_test_per_class: int = 1000,
    repeats: int = 10,
    seed: int = 0,
    specs: Sequence[str] = CURVE_SPECS,
    workers: int = 1,
    znorm: bool = True,
) -> list[CurveRow]:
    """Error rates of each spec for growing per-class training sizes.

    Within a repeat the test set is fixed; every (repeat, size) pair draws
    an independent training set. Generated series are z-normalized unless
    ``znorm`` is False, matching the preprocessing of the UCR copies.
    """
    if generator_id not in FAMILIES:
        raise UnknownGenerator(f"unknown generator {generator_id!r}; choose from {FAMILIES}")
    if any(s < 1 for s in train_sizes):
        raise ValueError("training sizes must be positive")
    parsed = [_as_spec(s) for s in specs]
    rows = []
    for r in range(repeats):
        test = generate(GeneratorSpec(generator_id, n_test_per_class, derive_seed(seed, r, 0)))
        if znorm:
            test = z_normalize_dataset(test)
        for size in train_sizes:
            train = generate(GeneratorSpec(generator_id, size, derive_seed(seed, r, 1, size)))
            if znorm:
                train = z_normalize_dataset(train)
            for spec in parsed:
                rep = evaluate(spec, train, test, workers)
                rows.append(CurveRow(generator_id, size, r, str(spec), rep.error_rate))
    return rows
