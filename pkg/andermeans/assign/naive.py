"""Brute-force nearest-centroid assignment."""

from __future__ import annotations

import numpy as np

from andermeans.assign.distances import nearest_two
from andermeans.errors import InvalidInputError
from andermeans.model.types import Assignment, CentroidSet, Dataset
from andermeans.parallel import map_row_chunks


def check_dimensions(data: Dataset, cents: CentroidSet) -> None:
    if cents.dim != data.dim:
        raise InvalidInputError(f"Centroid dimension {cents.dim} does not match dataset dimension {data.dim}")


def assign_naive(data: Dataset, cents: CentroidSet, workers: int = 1) -> Assignment:
    """labels[i] = argmin_j ||x_i - c_j||, ties to the lowest j."""
    check_dimensions(data, cents)
    parts = map_row_chunks(
        lambda start, stop: nearest_two(data.points[start:stop], cents.centers)[0],
        data.n,
        workers,
    )
    return Assignment.from_labels(np.concatenate(parts), cents.k)


class NaiveEngine:
    """Stateless engine wrapper around assign_naive."""

    name = "naive"

    def __init__(self, workers: int = 1) -> None:
        self.workers = workers
        self.full_scans = 0
        self.distance_evaluations = 0

    def __call__(self, data: Dataset, cents: CentroidSet) -> Assignment:
        result = assign_naive(data, cents, self.workers)
        self.full_scans += data.n
        self.distance_evaluations += data.n * cents.k
        return result
