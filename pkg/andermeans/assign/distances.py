"""The one comparison routine both assignment engines use."""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist


def nearest_two(points: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Closest centroid per row (lowest index on ties) plus squared distances
    to the closest and to the second-closest centroid (inf when K == 1)."""
    d2 = cdist(points, centers, "sqeuclidean")
    labels = np.argmin(d2, axis=1)
    rows = np.arange(d2.shape[0])
    best = d2[rows, labels]
    if centers.shape[0] == 1:
        return labels, best, np.full(d2.shape[0], np.inf)
    d2[rows, labels] = np.inf
    second = d2.min(axis=1)
    return labels, best, second


def squared_distance_rows(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """||points[i] - centers[i]||^2 row by row."""
    diff = points - centers
    return np.einsum("ij,ij->i", diff, diff)


def row_drift(old: np.ndarray, new: np.ndarray) -> np.ndarray:
    """Euclidean distance each centroid moved."""
    return np.sqrt(squared_distance_rows(new, old))
