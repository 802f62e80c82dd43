"""Shared domain types: labeled datasets of equal-length series, and errors."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class TsMetricError(Exception):
    """Base class for every error raised by this package."""


class EmptyDataset(TsMetricError):
    pass


class LengthMismatch(TsMetricError):
    pass


class NonFiniteValue(TsMetricError):
    pass


class DimensionMismatch(TsMetricError):
    pass


def as_series(values) -> np.ndarray:
    """Validate one series and return it as a read-only float64 vector."""
    x = np.array(values, dtype=np.float64).reshape(-1)
    if x.size < 1:
        raise EmptyDataset("time series must have at least one value")
    if not np.all(np.isfinite(x)):
        raise NonFiniteValue("time series contains NaN or infinite values")
    x.flags.writeable = False
    return x


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Equal-length series stored row-wise in ``X`` with integer labels ``y``.

    Both arrays are read-only; build instances through
    :func:`validate_dataset` or :meth:`from_arrays`.
    """

    X: np.ndarray
    y: np.ndarray
    class_counts: dict = field(init=False, repr=False)

    def __post_init__(self):
        counts: dict[int, int] = {}
        for label in self.y.tolist():
            counts[label] = counts.get(label, 0) + 1
        object.__setattr__(self, "class_counts", counts)

    @classmethod
    def from_arrays(cls, X, y) -> "LabeledDataset":
        X = np.array(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        y = np.asarray(y)
        if X.shape[0] == 0:
            raise EmptyDataset("dataset has no instances")
        if X.ndim != 2:
            raise LengthMismatch("series must form a 2-D array")
        if y.shape != (X.shape[0],):
            raise LengthMismatch(
                f"{X.shape[0]} series but {y.size} labels"
            )
        if X.shape[1] < 1:
            raise EmptyDataset("series must have at least one value")
        if not np.all(np.isfinite(X)):
            raise NonFiniteValue("dataset contains NaN or infinite values")
        y = y.astype(np.int64)
        X.flags.writeable = False
        y.flags.writeable = False
        return cls(X, y)

    @property
    def series_length(self) -> int:
        return self.X.shape[1]

    @property
    def labels(self) -> list[int]:
        """Distinct labels, sorted."""
        return sorted(self.class_counts)

    def __len__(self) -> int:
        return self.X.shape[0]

    def __iter__(self):
        for row, label in zip(self.X, self.y.tolist()):
            yield row, label

    def __eq__(self, other):
        if not isinstance(other, LabeledDataset):
            return NotImplemented
        return (
            self.X.shape == other.X.shape
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.y, other.y)
        )

    def __hash__(self):
        return hash((self.X.shape, self.X.tobytes(), self.y.tobytes()))

    def subset(self, index) -> "LabeledDataset":
        return LabeledDataset.from_arrays(self.X[index], self.y[index])


def validate_dataset(raw: Iterable[tuple[Sequence[float], int]] | LabeledDataset) -> LabeledDataset:
    """Build a :class:`LabeledDataset` from ``(series, label)`` pairs.

    Raises EmptyDataset, LengthMismatch or NonFiniteValue.
    """
    if isinstance(raw, LabeledDataset):
        return LabeledDataset.from_arrays(raw.X, raw.y)
    pairs = list(raw)
    if not pairs:
        raise EmptyDataset("dataset has no instances")
    rows = [np.asarray(series, dtype=np.float64).reshape(-1) for series, _ in pairs]
    n = rows[0].size
    for k, row in enumerate(rows):
        if row.size != n:
            raise LengthMismatch(
                f"instance {k} has length {row.size}, expected {n}"
            )
    labels = [int(label) for _, label in pairs]
    return LabeledDataset.from_arrays(np.vstack(rows), np.array(labels, dtype=np.int64))


def class_partition(d: LabeledDataset) -> dict[int, LabeledDataset]:
    """Split ``d`` by label; keys in sorted order, rows keep dataset order."""
    return {label: d.subset(np.flatnonzero(d.y == label)) for label in d.labels}
