"""Value types for samples, centroids, assignments and clustering energy."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from andermeans.errors import InvalidInputError


def _frozen_matrix(values: object, what: str) -> np.ndarray:
    matrix = np.array(values, dtype=np.float64, copy=True)
    if matrix.ndim == 1:
        matrix = matrix.reshape(-1, 1)
    if matrix.ndim != 2:
        raise InvalidInputError(f"{what} must be a 2-D matrix, got {matrix.ndim} dimension(s)")
    if matrix.shape[0] < 1 or matrix.shape[1] < 1:
        raise InvalidInputError(f"{what} must have at least one row and one column, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        row, col = np.argwhere(~np.isfinite(matrix))[0]
        raise InvalidInputError(f"{what} has a non-finite value at row {row}, column {col}")
    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True, eq=False)
class Dataset:
    """N samples in d dimensions. A 1-D input is read as N samples of dimension 1."""

    points: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", _frozen_matrix(self.points, "Dataset"))

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])


@dataclass(frozen=True, eq=False)
class CentroidSet:
    """K centroids in d dimensions (the iterate C)."""

    centers: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "centers", _frozen_matrix(self.centers, "CentroidSet"))

    @property
    def k(self) -> int:
        return int(self.centers.shape[0])

    @property
    def dim(self) -> int:
        return int(self.centers.shape[1])

    def flatten(self) -> np.ndarray:
        """Row-major (centroid-major) vector of length K*d."""
        return self.centers.reshape(-1).copy()

    @classmethod
    def from_flat(cls, vector: np.ndarray, k: int, dim: int) -> "CentroidSet":
        if vector.shape != (k * dim,):
            raise InvalidInputError(f"Flat centroid vector has shape {vector.shape}, expected ({k * dim},)")
        return cls(vector.reshape(k, dim))

    def same_as(self, other: "CentroidSet") -> bool:
        """Bitwise equality of the centroid matrices."""
        return self.centers.shape == other.centers.shape and bool(np.array_equal(self.centers, other.centers))

    def digest(self) -> str:
        """Short content hash used to prove paired runs share their seeds."""
        payload = np.ascontiguousarray(self.centers).tobytes() + repr(self.centers.shape).encode()
        return hashlib.sha256(payload).hexdigest()[:16]

    def check_pairs_with(self, data: "Dataset") -> None:
        if self.dim != data.dim:
            raise InvalidInputError(f"Centroid dimension {self.dim} does not match dataset dimension {data.dim}")
        if self.k > data.n:
            raise InvalidInputError(f"K = {self.k} exceeds the number of samples N = {data.n}")


@dataclass(frozen=True, eq=False)
class Assignment:
    """Cluster index per sample plus per-cluster member counts."""

    labels: np.ndarray
    counts: np.ndarray

    @classmethod
    def from_labels(cls, labels: np.ndarray, k: int) -> "Assignment":
        labels = np.array(labels, dtype=np.int64, copy=True)
        if labels.ndim != 1:
            raise InvalidInputError("Assignment labels must be a 1-D sequence")
        if k < 1:
            raise InvalidInputError(f"Cluster count must be at least 1, got {k}")
        if labels.size and (labels.min() < 0 or labels.max() >= k):
            bad = int(np.flatnonzero((labels < 0) | (labels >= k))[0])
            raise InvalidInputError(f"Label {int(labels[bad])} at sample {bad} is outside [0, {k})")
        counts = np.bincount(labels, minlength=k).astype(np.int64)
        labels.setflags(write=False)
        counts.setflags(write=False)
        return cls(labels=labels, counts=counts)

    @property
    def k(self) -> int:
        return int(self.counts.shape[0])

    def same_labels(self, other: "Assignment | None") -> bool:
        return other is not None and bool(np.array_equal(self.labels, other.labels))


@dataclass(frozen=True)
class Energy:
    """Total squared distance E(C) and its per-sample mean."""

    total: float
    mse: float = field(compare=False)

    @classmethod
    def from_total(cls, total: float, n: int) -> "Energy":
        if total < 0:
            raise InvalidInputError(f"Energy cannot be negative, got {total}")
        return cls(total=float(total), mse=float(total) / n)
