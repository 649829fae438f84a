"""Target energy of a clustering under a given assignment."""

from __future__ import annotations

import numpy as np

from andermeans.errors import InvalidInputError
from andermeans.model.types import Assignment, CentroidSet, Dataset, Energy
from andermeans.parallel import map_row_chunks


def check_compatible(data: Dataset, assign: Assignment, cents: CentroidSet) -> None:
    if cents.dim != data.dim:
        raise InvalidInputError(f"Centroid dimension {cents.dim} does not match dataset dimension {data.dim}")
    if assign.labels.shape[0] != data.n:
        raise InvalidInputError(f"Assignment covers {assign.labels.shape[0]} samples, dataset has {data.n}")
    if assign.k != cents.k or (assign.labels.size and int(assign.labels.max()) >= cents.k):
        raise InvalidInputError(f"Assignment refers to {assign.k} clusters but {cents.k} centroids were given")


def assigned_squared_distances(data: Dataset, assign: Assignment, cents: CentroidSet, workers: int = 1) -> np.ndarray:
    """||x_i - c_{label_i}||^2 per sample, in sample order."""
    check_compatible(data, assign, cents)

    def _chunk(start: int, stop: int) -> np.ndarray:
        diff = data.points[start:stop] - cents.centers[assign.labels[start:stop]]
        return np.einsum("ij,ij->i", diff, diff)

    parts = map_row_chunks(_chunk, data.n, workers)
    return np.concatenate(parts) if parts else np.zeros(0)


def energy(data: Dataset, assign: Assignment, cents: CentroidSet, workers: int = 1) -> Energy:
    """E(C) under the given assignment (no nearest-centroid recomputation)."""
    per_sample = assigned_squared_distances(data, assign, cents, workers)
    # One reduction over the full vector keeps the total independent of the worker count.
    return Energy.from_total(float(np.sum(per_sample)), data.n)
