"""Shared domain types: datasets, bounding boxes and point labelings."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .exceptions import (
    EmptyDataset,
    LabelLengthMismatch,
    NonFiniteCoordinate,
    RaggedRows,
)

NOISE = 0


@dataclass(frozen=True, eq=False)
class Dataset:
    """``n`` points in ``d`` dimensions with optional ground-truth labels.

    Construct through :func:`validate` to get a checked instance whose
    ``points`` is a float64 array of shape ``(n, d)``.
    """

    points: np.ndarray
    ground_truth: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def d(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True, eq=False)
class BoundingBox:
    lo: np.ndarray
    hi: np.ndarray

    @property
    def d(self) -> int:
        return len(self.lo)

    def contains(self, points) -> np.ndarray:
        points = np.atleast_2d(points)
        return np.all((points >= self.lo) & (points <= self.hi), axis=1)

    @classmethod
    def from_flat(cls, values: Sequence[float]) -> "BoundingBox":
        """Parse ``lo1, hi1, lo2, hi2, ...`` into a box."""
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or len(values) == 0 or len(values) % 2:
            raise ValueError("bounds need an even number of values lo1,hi1,...")
        lo, hi = values[0::2].copy(), values[1::2].copy()
        if not np.all(np.isfinite(values)) or np.any(lo > hi):
            raise ValueError("bounds must be finite with lo <= hi per dimension")
        return cls(lo, hi)


@dataclass(frozen=True, eq=False)
class PointLabeling:
    """Per-point cluster ids; clusters are ``1..K`` and ``noise_id`` marks noise."""

    labels: np.ndarray
    noise_id: int = field(default=NOISE)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def n_clusters(self) -> int:
        return int(self.labels.max()) if len(self.labels) else 0

    @property
    def n_noise(self) -> int:
        return int(np.count_nonzero(self.labels == self.noise_id))

    def cluster_sizes(self) -> dict:
        counts = np.bincount(self.labels, minlength=self.n_clusters + 1)
        return {k: int(counts[k]) for k in range(1, self.n_clusters + 1)}


class InvalidCoordinates(NonFiniteCoordinate):
    """A coordinate could not be read as a number."""


def _as_points(points) -> np.ndarray:
    if isinstance(points, np.ndarray):
        arr = points
    else:
        rows = list(points)
        lengths = {len(r) for r in rows}
        if len(lengths) > 1:
            raise RaggedRows(f"rows have mixed dimensionality {sorted(lengths)}")
        try:
            arr = np.asarray(rows, dtype=float)
        except (TypeError, ValueError) as exc:
            raise InvalidCoordinates(str(exc)) from exc
        if len(rows) == 0:
            arr = arr.reshape(0, 0)
    if arr.ndim != 2:
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, 0)
        else:
            raise RaggedRows(f"expected a 2-D point array, got shape {arr.shape}")
    return np.ascontiguousarray(arr, dtype=np.float64)


def validate(dataset) -> Dataset:
    """Check the dataset invariants and return a normalized :class:`Dataset`.

    Accepts a :class:`Dataset` or any row sequence.  An already-normalized
    dataset is returned as-is, so ``validate`` is idempotent.
    """
    if isinstance(dataset, Dataset):
        points, truth = dataset.points, dataset.ground_truth
    else:
        points, truth = dataset, None

    arr = _as_points(points)
    if arr.shape[0] > 0 and arr.shape[1] < 1:
        raise RaggedRows("points need at least one coordinate")
    if arr.size and not np.all(np.isfinite(arr)):
        row = int(np.argwhere(~np.isfinite(arr))[0, 0])
        raise NonFiniteCoordinate(f"non-finite coordinate at row {row}")

    if truth is not None:
        truth_arr = np.asarray(truth)
        if truth_arr.ndim != 1 or len(truth_arr) != arr.shape[0]:
            raise LabelLengthMismatch(
                f"{truth_arr.size} labels for {arr.shape[0]} points"
            )
        truth_arr = truth_arr.astype(np.int64, copy=False)
    else:
        truth_arr = None

    if (
        isinstance(dataset, Dataset)
        and arr is dataset.points
        and truth_arr is dataset.ground_truth
    ):
        return dataset
    return Dataset(arr, truth_arr)


def compute_bounds(dataset) -> BoundingBox:
    """Exact per-dimension min/max of the points."""
    points = dataset.points if isinstance(dataset, Dataset) else np.asarray(dataset)
    if len(points) == 0:
        raise EmptyDataset("cannot bound an empty dataset")
    return BoundingBox(points.min(axis=0), points.max(axis=0))
