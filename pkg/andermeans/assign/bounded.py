"""Bound-pruned exact assignment (one upper and one lower bound per sample).

Bounds live on plain Euclidean distances so they can be loosened by centroid
drift through the triangle inequality; squared distances only appear inside
full rescans. Drift loosening stays valid for arbitrarily large centroid
moves, which extrapolated iterates produce.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from andermeans.assign.distances import nearest_two, row_drift, squared_distance_rows
from andermeans.assign.naive import check_dimensions
from andermeans.errors import InvalidInputError
from andermeans.model.types import Assignment, CentroidSet, Dataset
from andermeans.parallel import map_row_chunks

# Relative margin on every pruning test; absorbs rounding in the bound arithmetic
# so a pruned sample is one whose nearest centroid is unambiguous.
PRUNE_SLACK = 1e-9


@dataclass
class BoundsState:
    """Per-sample bounds carried between assignment calls."""

    upper: np.ndarray | None = None
    lower: np.ndarray | None = None
    labels: np.ndarray | None = None
    last_centers: np.ndarray | None = None
    full_scans: int = 0
    distance_evaluations: int = 0

    @classmethod
    def fresh(cls) -> "BoundsState":
        return cls()

    def is_fresh(self) -> bool:
        return self.last_centers is None

    def matches(self, data: Dataset, cents: CentroidSet) -> bool:
        return (
            self.last_centers is not None
            and self.labels is not None
            and self.labels.shape[0] == data.n
            and self.last_centers.shape == cents.centers.shape
        )


def centroid_drift(old: CentroidSet, new: CentroidSet) -> np.ndarray:
    """Entry j = ||c_j^new - c_j^old||."""
    if old.centers.shape != new.centers.shape:
        raise InvalidInputError(
            f"Cannot measure drift between centroid sets of shape {old.centers.shape} and {new.centers.shape}"
        )
    return row_drift(old.centers, new.centers)


def _pruned(upper: np.ndarray, bound: np.ndarray) -> np.ndarray:
    return upper * (1.0 + PRUNE_SLACK) < bound * (1.0 - PRUNE_SLACK)


def _half_separation(centers: np.ndarray) -> np.ndarray:
    """s_j = half the distance from c_j to its nearest other centroid."""
    if centers.shape[0] == 1:
        return np.full(1, np.inf)
    between = cdist(centers, centers, "sqeuclidean")
    np.fill_diagonal(between, np.inf)
    return 0.5 * np.sqrt(between.min(axis=1))


def _rescan(data: Dataset, centers: np.ndarray, rows: np.ndarray, state: BoundsState, workers: int) -> None:
    parts = map_row_chunks(
        lambda start, stop: nearest_two(data.points[rows[start:stop]], centers),
        rows.shape[0],
        workers,
    )
    labels = np.concatenate([p[0] for p in parts])
    best = np.concatenate([p[1] for p in parts])
    second = np.concatenate([p[2] for p in parts])
    state.labels[rows] = labels
    state.upper[rows] = np.sqrt(best)
    state.lower[rows] = np.sqrt(second)
    state.full_scans += rows.shape[0]
    state.distance_evaluations += rows.shape[0] * centers.shape[0]


def _full_pass(data: Dataset, cents: CentroidSet, state: BoundsState, workers: int) -> None:
    state.labels = np.zeros(data.n, dtype=np.int64)
    state.upper = np.zeros(data.n)
    state.lower = np.zeros(data.n)
    _rescan(data, cents.centers, np.arange(data.n), state, workers)


def _pruned_pass(data: Dataset, cents: CentroidSet, state: BoundsState, workers: int) -> None:
    centers = cents.centers
    drift = row_drift(state.last_centers, centers)
    if not np.any(drift):
        # Same centroids as last call: the stored labels are already exact.
        return

    labels, upper, lower = state.labels, state.upper, state.lower
    upper += drift[labels]
    if cents.k > 1:
        order = np.argsort(drift, kind="stable")
        farthest = order[-1]
        lower -= np.where(labels == farthest, drift[order[-2]], drift[farthest])
        np.maximum(lower, 0.0, out=lower)

    bound = np.maximum(_half_separation(centers)[labels], lower)
    candidates = np.flatnonzero(~_pruned(upper, bound))
    if candidates.size == 0:
        return

    upper[candidates] = np.sqrt(
        squared_distance_rows(data.points[candidates], centers[labels[candidates]])
    )
    state.distance_evaluations += candidates.shape[0]
    remaining = candidates[~_pruned(upper[candidates], bound[candidates])]
    if remaining.size:
        _rescan(data, centers, remaining, state, workers)


def assign_bounded(data: Dataset, cents: CentroidSet, state: BoundsState, workers: int = 1) -> Assignment:
    """Exact nearest-centroid assignment, identical to assign_naive including
    tie-breaks, skipping samples whose bounds prove the label cannot change."""
    check_dimensions(data, cents)
    if state.is_fresh() or not state.matches(data, cents):
        _full_pass(data, cents, state, workers)
    else:
        _pruned_pass(data, cents, state, workers)
    state.last_centers = cents.centers.copy()
    return Assignment.from_labels(state.labels, cents.k)


class BoundedEngine:
    """Engine owning one BoundsState; one solve at a time."""

    name = "bounded"

    def __init__(self, workers: int = 1, state: BoundsState | None = None) -> None:
        self.workers = workers
        self.state = state or BoundsState.fresh()

    @property
    def full_scans(self) -> int:
        return self.state.full_scans

    @property
    def distance_evaluations(self) -> int:
        return self.state.distance_evaluations

    def __call__(self, data: Dataset, cents: CentroidSet) -> Assignment:
        return assign_bounded(data, cents, self.state, self.workers)
